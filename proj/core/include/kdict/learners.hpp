#pragma once

#include "kdict/dictionary.hpp"

#include <cstddef>
#include <string_view>

namespace kdict {

enum class Algorithm { lms_identity, lms_gram, nlms, functional_sgd };

std::string_view to_string(Algorithm algo);
/// Accepts the CLI spellings lms, lms-gram, nlms, functional as well as the
/// enumerator names.
Algorithm parse_algorithm(std::string_view name);

struct LearnerConfig {
  Algorithm algorithm = Algorithm::nlms;
  double eta = 0.5;
  double eps = 1e-6;

  /// eta > 0, eps >= 0, and 1 - eta*eps > 0 for the functional update.
  void validate() const;
};

/// Dual coefficients over the dictionary atoms. psi(x) = alpha^T k(x).
struct ModelState {
  Vector alpha = Vector(0);
  std::size_t dict_version = 0;

  double predict(const Dictionary& dict, const VectorRef& x) const;
};

struct StepOutcome {
  double prediction;
  double error;
  bool admitted;
  std::size_t new_m;
};

/// alpha + eta (e k - eps alpha)
Vector update_lms_identity(const VectorRef& alpha, const VectorRef& kvec,
                           double error, double eta, double eps);

/// alpha + eta (e k - eps K alpha)
Vector update_lms_gram(const VectorRef& alpha, const VectorRef& kvec,
                       const Matrix& gram, double error, double eta,
                       double eps);

/// alpha + eta / (||k||^2 + eps) e k. Throws NumericalError when the
/// denominator is zero.
Vector update_nlms(const VectorRef& alpha, const VectorRef& kvec, double error,
                   double eta, double eps);

/// (1 - eta eps) alpha + eta e xi, where xi = K^{-1} k(x) are the coordinates
/// of the projection of k(x, .) onto the dictionary span.
Vector update_functional(const VectorRef& alpha, const Dictionary& dict,
                         const VectorRef& x, double error, double eta,
                         double eps);

/// One online iteration:
///  1. predict with the current state and dictionary, e = y - prediction;
///  2. offer x to the dictionary, appending a zero coefficient on accept;
///  3. apply the configured update over the (possibly grown) dictionary.
/// On error nothing is modified.
StepOutcome step(ModelState& state, Dictionary& dict, const VectorRef& x,
                 double y, const LearnerConfig& cfg);

}  // namespace kdict
