#include "kdict/ridge.hpp"

#include "kdict/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kdict {

void RidgeProblem::validate() const {
  if (samples.empty()) throw InvalidArgument("ridge: need at least one sample");
  if (static_cast<std::size_t>(targets.size()) != samples.size()) {
    throw InvalidArgument("ridge: " + std::to_string(targets.size()) +
                          " targets for " + std::to_string(samples.size()) +
                          " samples");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw InvalidArgument("ridge: eps must be finite and > 0");
  }
  if (!targets.allFinite()) throw InvalidArgument("ridge: non-finite target");
}

namespace {

struct NormalEquations {
  Matrix lhs;
  Vector rhs;
};

// K is symmetric, so K^T = K throughout.
NormalEquations normal_equations(const RidgeProblem& prob, const Matrix& k) {
  const auto n = k.rows();
  Matrix lhs = k.transpose() * k;
  if (prob.variant == RidgeVariant::rkhs_norm) {
    lhs += prob.eps * k.transpose();
  } else {
    lhs += prob.eps * Matrix::Identity(n, n);
  }
  lhs = 0.5 * (lhs + lhs.transpose()).eval();
  return {std::move(lhs), k.transpose() * prob.targets};
}

double relative_residual(const NormalEquations& ne, const VectorRef& alpha) {
  const double scale =
      std::max({ne.rhs.norm(), ne.lhs.norm() * alpha.norm(),
                std::numeric_limits<double>::min()});
  return (ne.lhs * alpha - ne.rhs).norm() / scale;
}

}  // namespace

Vector solve(const RidgeProblem& prob) {
  prob.validate();
  const Matrix k = gram_matrix(prob.kernel, prob.samples);
  const auto ne = normal_equations(prob, k);
  const char* advice = prob.variant == RidgeVariant::rkhs_norm
                           ? " (K is singular; use the param_norm variant)"
                           : "";
  Eigen::LLT<Matrix> llt(ne.lhs);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string("ridge: normal equations are not "
                                     "positive definite") + advice);
  }
  Vector alpha = llt.solve(ne.rhs);
  if (!alpha.allFinite() || relative_residual(ne, alpha) > 1e-8) {
    throw NumericalError(std::string("ridge: normal-equation residual above "
                                     "1e-8") + advice);
  }
  return alpha;
}

double objective(const RidgeProblem& prob, const VectorRef& alpha) {
  prob.validate();
  if (static_cast<std::size_t>(alpha.size()) != prob.samples.size()) {
    throw InvalidArgument("ridge objective: alpha has the wrong length");
  }
  const Matrix k = gram_matrix(prob.kernel, prob.samples);
  const double fit = 0.5 * (k * alpha - prob.targets).squaredNorm();
  const double penalty = prob.variant == RidgeVariant::rkhs_norm
                             ? alpha.dot(k * alpha)
                             : alpha.squaredNorm();
  return fit + 0.5 * prob.eps * penalty;
}

Vector gradient(const RidgeProblem& prob, const VectorRef& alpha) {
  prob.validate();
  if (static_cast<std::size_t>(alpha.size()) != prob.samples.size()) {
    throw InvalidArgument("ridge gradient: alpha has the wrong length");
  }
  const Matrix k = gram_matrix(prob.kernel, prob.samples);
  Vector g = k.transpose() * (k * alpha - prob.targets);
  if (prob.variant == RidgeVariant::rkhs_norm) {
    g += prob.eps * (k * alpha);
  } else {
    g += prob.eps * alpha;
  }
  return g;
}

double normal_equation_residual(const RidgeProblem& prob,
                                const VectorRef& alpha) {
  prob.validate();
  const Matrix k = gram_matrix(prob.kernel, prob.samples);
  return relative_residual(normal_equations(prob, k), alpha);
}

}  // namespace kdict
