#pragma once

#include "kdict/kernel.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace kdict {

enum class CriterionKind { distance, approximation, coherence, babel };

inline constexpr CriterionKind kAllCriteria[] = {
    CriterionKind::distance, CriterionKind::approximation,
    CriterionKind::coherence, CriterionKind::babel};

std::string_view to_string(CriterionKind kind);
CriterionKind parse_criterion(std::string_view name);

/// Admission rule. `threshold` is delta for distance/approximation and
/// gamma for coherence/babel.
struct CriterionConfig {
  CriterionKind kind = CriterionKind::coherence;
  double threshold = 0.5;
  std::optional<std::size_t> max_atoms;

  /// Throws InvalidArgument unless delta > 0, gamma in (0, 1] for coherence,
  /// gamma > 0 for babel, and max_atoms (if set) is positive.
  void validate() const;

  bool operator==(const CriterionConfig&) const = default;
};

/// Coefficients of the orthogonal projection of k(x, .) onto the span of the
/// atoms, plus the squared reconstruction error.
struct ProjectionResult {
  Vector coefficients;
  double residual_sq;
};

enum class Admission { accepted, rejected };

/// Pivot below which admitting a candidate is refused as near-singular.
inline constexpr double kMinSchurPivot = 1e-12;

/// Ordered set of atoms with the Gram matrix and its inverse kept in sync.
///
/// Admissions are serialized (single writer). Const member functions are
/// safe to call concurrently between admissions.
class Dictionary {
 public:
  Dictionary(KernelSpec kernel, CriterionConfig criterion);

  /// Builds a dictionary from explicit atoms without running the admission
  /// test (file loading, hand-built fixtures). Atoms may be linearly
  /// dependent; the inverse is then unavailable and has_inverse() is false.
  static Dictionary from_atoms(KernelSpec kernel, CriterionConfig criterion,
                               std::vector<Vector> atoms);

  /// Runs the configured criterion and appends the candidate on acceptance.
  /// An empty dictionary always accepts; a full one (max_atoms) and exact
  /// duplicates of an existing atom are always rejected. On rejection the
  /// object is untouched. Throws NumericalError when the Schur pivot of an
  /// accepted candidate falls below kMinSchurPivot; the dictionary is then
  /// left unchanged.
  Admission admit(const VectorRef& x);

  /// Criterion predicate alone, without the duplicate / capacity screens.
  /// Requires a non-empty dictionary.
  bool passes_criterion(const VectorRef& x) const;

  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  std::size_t dimension() const { return dim_; }

  const KernelSpec& kernel() const { return kernel_; }
  const CriterionConfig& criterion() const { return criterion_; }
  const std::vector<Vector>& atoms() const { return atoms_; }
  const Matrix& gram() const { return gram_; }
  bool has_inverse() const { return has_inverse_; }
  /// Throws NumericalError when the Gram matrix is singular.
  const Matrix& gram_inverse() const;

  Vector kernel_vector(const VectorRef& x) const;

  /// xi = K^{-1} k(x), residual = k(x,x) - k(x)^T xi clamped at 0.
  ProjectionResult project(const VectorRef& x) const;

  /// Accepted admissions since the last full re-inversion.
  std::size_t updates_since_refactor() const { return since_refactor_; }

 private:
  void check_candidate(const VectorRef& x) const;
  void refactor();

  KernelSpec kernel_;
  CriterionConfig criterion_;
  std::size_t dim_ = 0;
  std::vector<Vector> atoms_;
  Matrix gram_;
  Matrix gram_inv_;
  bool has_inverse_ = true;
  std::size_t since_refactor_ = 0;
};

/// Full re-inversion cadence for the incremental inverse.
inline constexpr std::size_t kRefactorInterval = 64;

// Per-criterion statistics and tests against a non-empty dictionary. The
// tests accept on equality (>= delta^2, <= gamma).

/// min_j k(x,x) - k(x,a_j)^2 / k(a_j,a_j).
double distance_statistic(const Dictionary& dict, const VectorRef& x);
/// Projection residual k(x,x) - k(x)^T K^{-1} k(x).
double approximation_statistic(const Dictionary& dict, const VectorRef& x);
/// max_j |k(x,a_j)| / sqrt(k(x,x) k(a_j,a_j)).
double coherence_statistic(const Dictionary& dict, const VectorRef& x);
/// sum_j |k(x,a_j)|, without normalization.
double babel_statistic(const Dictionary& dict, const VectorRef& x);

bool test_distance(const Dictionary& dict, const VectorRef& x, double delta);
bool test_approximation(const Dictionary& dict, const VectorRef& x,
                        double delta);
bool test_coherence(const Dictionary& dict, const VectorRef& x, double gamma);
bool test_babel(const Dictionary& dict, const VectorRef& x, double gamma);

/// Sparsity measure of a finished dictionary, computed from its Gram matrix.
/// Distance, approximation and coherence need at least two atoms; Babel
/// needs one. Throws NumericalError when a leave-one-out Gram block is
/// singular (approximation only).
double measure(const Matrix& gram, CriterionKind kind);
inline double measure(const Dictionary& dict, CriterionKind kind) {
  return measure(dict.gram(), kind);
}

}  // namespace kdict
