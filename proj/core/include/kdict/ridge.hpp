#pragma once

#include "kdict/kernel.hpp"

#include <vector>

namespace kdict {

enum class RidgeVariant {
  /// 1/2 ||K a - y||^2 + eps/2 a^T K a
  rkhs_norm,
  /// 1/2 ||K a - y||^2 + eps/2 ||a||^2
  param_norm,
};

struct RidgeProblem {
  std::vector<Vector> samples;
  Vector targets;
  KernelSpec kernel = KernelSpec::gaussian(1.0);
  double eps = 1.0;
  RidgeVariant variant = RidgeVariant::param_norm;

  void validate() const;
};

/// Solves the normal equations (K^T K + eps K^T) a = K^T y or
/// (K^T K + eps I) a = K^T y with a Cholesky factorization. The (K + eps I)
/// shortcut is not used since it requires K to be nonsingular. Throws
/// NumericalError when the system cannot be factorized or the solution
/// misses the 1e-8 relative residual.
Vector solve(const RidgeProblem& prob);

double objective(const RidgeProblem& prob, const VectorRef& alpha);
Vector gradient(const RidgeProblem& prob, const VectorRef& alpha);

/// ||A a - b|| / max(||b||, ||A|| ||a||) for the variant's normal equations.
double normal_equation_residual(const RidgeProblem& prob,
                                const VectorRef& alpha);

}  // namespace kdict
