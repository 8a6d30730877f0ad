#include "kdict/learners.hpp"

#include "kdict/error.hpp"

#include <cmath>
#include <string>

namespace kdict {

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::lms_identity:
      return "lms";
    case Algorithm::lms_gram:
      return "lms-gram";
    case Algorithm::nlms:
      return "nlms";
    case Algorithm::functional_sgd:
      return "functional";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "lms" || name == "lms_identity") return Algorithm::lms_identity;
  if (name == "lms-gram" || name == "lms_gram") return Algorithm::lms_gram;
  if (name == "nlms") return Algorithm::nlms;
  if (name == "functional" || name == "functional_sgd") {
    return Algorithm::functional_sgd;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(name) +
                        "' (expected lms, lms-gram, nlms or functional)");
}

void LearnerConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidArgument("learner: eta must be finite and > 0");
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("learner: eps must be finite and >= 0");
  }
  if (algorithm == Algorithm::functional_sgd && !(1.0 - eta * eps > 0.0)) {
    throw NumericalError(
        "functional update diverges: 1 - eta*eps must be > 0");
  }
}

double ModelState::predict(const Dictionary& dict, const VectorRef& x) const {
  if (static_cast<std::size_t>(alpha.size()) != dict.size()) {
    throw InvalidArgument("model state has " + std::to_string(alpha.size()) +
                          " coefficients for " + std::to_string(dict.size()) +
                          " atoms");
  }
  if (dict.empty()) return 0.0;
  return alpha.dot(dict.kernel_vector(x));
}

namespace {

void require_same_length(const VectorRef& alpha, const VectorRef& kvec) {
  if (alpha.size() != kvec.size()) {
    throw InvalidArgument("update: alpha and kernel vector lengths differ");
  }
}

}  // namespace

Vector update_lms_identity(const VectorRef& alpha, const VectorRef& kvec,
                           double error, double eta, double eps) {
  require_same_length(alpha, kvec);
  return alpha + eta * (error * kvec - eps * alpha);
}

Vector update_lms_gram(const VectorRef& alpha, const VectorRef& kvec,
                       const Matrix& gram, double error, double eta,
                       double eps) {
  require_same_length(alpha, kvec);
  if (gram.rows() != alpha.size() || gram.cols() != alpha.size()) {
    throw InvalidArgument("update: Gram size does not match alpha");
  }
  return alpha + eta * (error * kvec - eps * (gram * alpha));
}

Vector update_nlms(const VectorRef& alpha, const VectorRef& kvec, double error,
                   double eta, double eps) {
  require_same_length(alpha, kvec);
  const double denom = kvec.squaredNorm() + eps;
  if (!(denom > 0.0)) {
    throw NumericalError("nlms: ||k||^2 + eps is zero");
  }
  return alpha + (eta / denom * error) * kvec;
}

Vector update_functional(const VectorRef& alpha, const Dictionary& dict,
                         const VectorRef& x, double error, double eta,
                         double eps) {
  if (static_cast<std::size_t>(alpha.size()) != dict.size()) {
    throw InvalidArgument("update: alpha length does not match dictionary");
  }
  const double decay = 1.0 - eta * eps;
  if (!(decay > 0.0)) {
    throw NumericalError("functional update diverges: 1 - eta*eps <= 0");
  }
  return decay * alpha + (eta * error) * dict.project(x).coefficients;
}

StepOutcome step(ModelState& state, Dictionary& dict, const VectorRef& x,
                 double y, const LearnerConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(y)) throw InvalidArgument("step: target is not finite");
  const double prediction = state.predict(dict, x);
  const double error = y - prediction;

  // Work on copies so a failure in either stage leaves both objects intact.
  Dictionary next_dict = dict;
  const bool admitted = next_dict.admit(x) == Admission::accepted;
  Vector alpha = state.alpha;
  if (admitted) {
    alpha.conservativeResize(alpha.size() + 1);
    alpha(alpha.size() - 1) = 0.0;
  }

  const Vector kvec = next_dict.kernel_vector(x);
  switch (cfg.algorithm) {
    case Algorithm::lms_identity:
      alpha = update_lms_identity(alpha, kvec, error, cfg.eta, cfg.eps);
      break;
    case Algorithm::lms_gram:
      alpha = update_lms_gram(alpha, kvec, next_dict.gram(), error, cfg.eta,
                              cfg.eps);
      break;
    case Algorithm::nlms:
      alpha = update_nlms(alpha, kvec, error, cfg.eta, cfg.eps);
      break;
    case Algorithm::functional_sgd:
      alpha = update_functional(alpha, next_dict, x, error, cfg.eta, cfg.eps);
      break;
  }

  if (admitted) dict = std::move(next_dict);
  state.alpha = std::move(alpha);
  state.dict_version = dict.size();
  return StepOutcome{prediction, error, admitted, dict.size()};
}

}  // namespace kdict
