#pragma once

#include "kdict/dictionary.hpp"
#include "kdict/kernel.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kdict {

/// Eigenpairs of a symmetric matrix, values sorted non-increasing; column j
/// of `vectors` pairs with values[j].
struct EigenSpectrum {
  Vector values;
  Matrix vectors;

  double lambda_max() const { return values(0); }
  double lambda_min() const { return values(values.size() - 1); }
};

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr int kMaxJacobiSweeps = 100;

/// Cyclic Jacobi rotations until the largest off-diagonal magnitude drops
/// below 1e-12 * ||A||_F (or 100 sweeps). Throws InvalidArgument on a
/// non-square or asymmetric input. Eigenvector signs are normalized so the
/// largest-magnitude component of each column is positive.
EigenSpectrum eigensolve(const Matrix& a);

struct Disc {
  double center;
  double radius;
};

/// Row discs of a symmetric matrix: center a_ii, radius sum_{j!=i} |a_ij|.
std::vector<Disc> gersgorin_intervals(const Matrix& a);

/// True when `value` lies in the union of the discs widened by `slack`.
bool in_disc_union(const std::vector<Disc>& discs, double value,
                   double slack = 0.0);

struct EigenBounds {
  double lower;
  double upper;

  bool vacuous() const { return lower <= 0.0; }
};

/// Eigenvalue interval of a Gram matrix whose sparsity measure of `kind` is
/// `theta` (delta or gamma):
///   distance       r^2 -/+ (m-1) R sqrt(R^2 - delta^2) around R^2
///   approximation  [delta^2, 2R^2 - delta^2]
///   coherence      [r^2 - (m-1) gamma R^2, R^2 + (m-1) gamma R^2]
///   babel          [r^2 - gamma, R^2 + gamma]
/// A negative lower bound is returned as-is.
EigenBounds eigen_bounds(CriterionKind kind, double theta, std::size_t m,
                         const NormRange& range);

/// Sufficient condition for the atoms to be linearly independent; when true
/// the lower eigenvalue bound is strictly positive.
bool lin_indep_condition(CriterionKind kind, double theta, std::size_t m,
                         const NormRange& range);

/// upper / lower of eigen_bounds, +inf when lower <= 0. The approximation
/// form reduces to 2R^2/delta^2 - 1.
double condition_number_bound(CriterionKind kind, double theta, std::size_t m,
                              const NormRange& range);

struct IsometryConstant {
  double nu;
  /// Atoms divided by this factor have eigenvalue bounds symmetric about 1.
  double rescale_factor;
};

/// nu = (u - l) / (u + l) for (l, u) = eigen_bounds, with atoms rescaled by
/// sqrt((u + l) / 2). For r = R = 1 this is the unit-norm closed form and the
/// factor is exactly 1. The distance and coherence forms use (m - 1).
/// Throws NumericalError when u + l <= 0.
IsometryConstant isometry_constant(CriterionKind kind, double theta,
                                   std::size_t m, const NormRange& range);

struct IsometryCheck {
  double worst_ratio_low;
  double worst_ratio_high;
  double worst_ip_deviation;
};

inline constexpr std::size_t kDefaultIsometryTrials = 10000;

/// Monte-Carlo probe of the quasi-isometry on K / rescale_factor^2: over
/// `trials` draws of standard-normal alpha (and independent pairs), the
/// extreme Rayleigh ratios alpha^T K alpha / ||alpha||^2 and the largest
/// |a'^T (K - I) a''| / (||a'|| ||a''||). Trial t uses its own generator
/// derived from (seed, t), so results do not depend on scheduling.
IsometryCheck verify_isometry(const Matrix& gram, double rescale_factor,
                              std::size_t trials, std::uint64_t seed);

/// Bounds and checks for one sparsity measure of a dictionary.
struct BoundSet {
  CriterionKind measure_kind;
  double measure_value;
  double lower;
  double upper;
  bool lin_indep_condition_holds;
  double cond_number_bound;
  double isometry_nu;
  double rescale_factor;
  IsometryCheck isometry;
  bool violated;

  bool vacuous() const { return lower <= 0.0; }
};

struct Violation {
  std::string bound;
  /// How far past the bound the observed value lies (positive).
  double margin;
};

struct SpectralReport {
  EigenSpectrum spectrum;
  double condition_number;
  std::vector<BoundSet> per_measure;
  std::vector<Violation> violations;

  bool gersgorin_ok;

  const BoundSet& bounds_for(CriterionKind kind) const;
};

/// Absolute slack used for every containment check.
inline constexpr double kContainmentSlack = 1e-9;

/// Measure value the report uses for `kind`: measure() when defined, with a
/// one-atom dictionary mapped to sqrt(k_11) for distance/approximation and 0
/// for coherence, and a singular leave-one-out block mapped to an
/// approximation measure of 0.
double report_measure(const Matrix& gram, CriterionKind kind);

/// Eigendecomposition, per-measure bounds from the measured sparsity values,
/// quasi-isometry probes and the list of violated containments.
SpectralReport spectral_report(const Matrix& gram, const NormRange& range,
                               std::size_t trials = kDefaultIsometryTrials,
                               std::uint64_t seed = 0);

/// CSV block, one row per measure kind:
/// kind,measure,lower,upper,lambda_min,lambda_max,cond,cond_bound,nu,
/// worst_ratio_low,worst_ratio_high,worst_ip_dev,violated
void write_report_csv(std::ostream& os, const SpectralReport& report);

}  // namespace kdict
