#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kdict {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

enum class KernelFamily { linear, polynomial, gaussian };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// A positive-definite reproducing kernel. Construct through the named
/// factories; they validate parameters.
class KernelSpec {
 public:
  static KernelSpec linear();
  /// (<x,y> + offset)^degree; degree >= 1, offset >= 0.
  static KernelSpec polynomial(int degree, double offset);
  /// exp(-||x-y||^2 / (2 sigma^2)); sigma > 0.
  static KernelSpec gaussian(double sigma);

  KernelFamily family() const { return family_; }
  int degree() const { return degree_; }
  double offset() const { return offset_; }
  double sigma() const { return sigma_; }

  /// True when k(x,x) = 1 for every x.
  bool unit_norm() const { return family_ == KernelFamily::gaussian; }

  /// Throws InvalidArgument on dimension mismatch or non-finite input.
  double operator()(const VectorRef& x, const VectorRef& y) const;

  bool operator==(const KernelSpec&) const = default;

 private:
  KernelSpec(KernelFamily family, int degree, double offset, double sigma)
      : family_(family), degree_(degree), offset_(offset), sigma_(sigma) {}

  KernelFamily family_;
  int degree_;
  double offset_;
  double sigma_;
};

inline double eval(const KernelSpec& k, const VectorRef& x,
                   const VectorRef& y) {
  return k(x, y);
}

/// Entry j is k(atoms[j], x).
Vector kernel_vector(const KernelSpec& k, std::span<const Vector> atoms,
                     const VectorRef& x);

/// Full Gram matrix of a point set.
Matrix gram_matrix(const KernelSpec& k, std::span<const Vector> points);

enum class NormSource { analytic, empirical, user_supplied };

std::string_view to_string(NormSource source);

/// Range [r^2, R^2] of the self-similarity k(x,x) over the input domain.
struct NormRange {
  double r_sq;
  double R_sq;
  NormSource source;

  /// Validates 0 <= r_sq <= R_sq.
  static NormRange user(double r_sq, double R_sq);

  bool is_unit() const { return r_sq == 1.0 && R_sq == 1.0; }
};

/// Gaussian kernels have the analytic range (1, 1). Other families need
/// samples, and the result is only the min/max of k(x,x) over those samples,
/// not a true infimum/supremum.
NormRange norm_range(const KernelSpec& k,
                     std::optional<std::span<const Vector>> samples = {});

}  // namespace kdict
