#include "kdict/kernel.hpp"

#include "kdict/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace kdict {

namespace {

void check_inputs(const VectorRef& x, const VectorRef& y) {
  if (x.size() != y.size()) {
    throw InvalidArgument("kernel: dimension mismatch (" +
                          std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()) + ")");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw InvalidArgument("kernel: non-finite input");
  }
}

double int_pow(double base, int exponent) {
  double result = 1.0;
  for (; exponent > 0; exponent >>= 1) {
    if (exponent & 1) result *= base;
    base *= base;
  }
  return result;
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::linear:
      return "linear";
    case KernelFamily::polynomial:
      return "polynomial";
    case KernelFamily::gaussian:
      return "gaussian";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "linear") return KernelFamily::linear;
  if (name == "polynomial") return KernelFamily::polynomial;
  if (name == "gaussian") return KernelFamily::gaussian;
  throw InvalidArgument("unknown kernel '" + std::string(name) +
                        "' (expected linear, polynomial or gaussian)");
}

KernelSpec KernelSpec::linear() {
  return KernelSpec(KernelFamily::linear, 1, 0.0, 1.0);
}

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  if (degree < 1) throw InvalidArgument("polynomial kernel: degree must be >= 1");
  if (!(offset >= 0.0) || !std::isfinite(offset)) {
    throw InvalidArgument("polynomial kernel: offset must be finite and >= 0");
  }
  return KernelSpec(KernelFamily::polynomial, degree, offset, 1.0);
}

KernelSpec KernelSpec::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("gaussian kernel: sigma must be finite and > 0");
  }
  return KernelSpec(KernelFamily::gaussian, 1, 0.0, sigma);
}

double KernelSpec::operator()(const VectorRef& x, const VectorRef& y) const {
  check_inputs(x, y);
  switch (family_) {
    case KernelFamily::linear:
      return x.dot(y);
    case KernelFamily::polynomial:
      return int_pow(x.dot(y) + offset_, degree_);
    case KernelFamily::gaussian:
      return std::exp(-(x - y).squaredNorm() / (2.0 * sigma_ * sigma_));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Vector kernel_vector(const KernelSpec& k, std::span<const Vector> atoms,
                     const VectorRef& x) {
  Vector out(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    out(static_cast<Eigen::Index>(j)) = k(atoms[j], x);
  }
  return out;
}

Matrix gram_matrix(const KernelSpec& k, std::span<const Vector> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = k(points[static_cast<std::size_t>(i)],
                         points[static_cast<std::size_t>(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

std::string_view to_string(NormSource source) {
  switch (source) {
    case NormSource::analytic:
      return "analytic";
    case NormSource::empirical:
      return "empirical";
    case NormSource::user_supplied:
      return "user_supplied";
  }
  return "?";
}

NormRange NormRange::user(double r_sq, double R_sq) {
  if (!(r_sq >= 0.0) || !(R_sq >= r_sq) || !std::isfinite(R_sq)) {
    throw InvalidArgument("norm range: need 0 <= r^2 <= R^2 < inf");
  }
  return NormRange{r_sq, R_sq, NormSource::user_supplied};
}

NormRange norm_range(const KernelSpec& k,
                     std::optional<std::span<const Vector>> samples) {
  if (k.unit_norm()) return NormRange{1.0, 1.0, NormSource::analytic};
  if (!samples || samples->empty()) {
    throw InvalidArgument(
        std::string("norm range: ") + std::string(to_string(k.family())) +
        " kernel has no analytic range; supply samples or a user range");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& x : *samples) {
    const double v = k(x, x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return NormRange{lo, hi, NormSource::empirical};
}

}  // namespace kdict
