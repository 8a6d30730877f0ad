#include "kdict/spectral.hpp"

#include "kdict/csv.hpp"
#include "kdict/error.hpp"
#include "kdict/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace kdict {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw InvalidArgument("eigensolve: matrix is not square");
  }
  if (a.size() == 0) return;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > kSymmetryTolerance * scale) {
        throw InvalidArgument("eigensolve: matrix is not symmetric at (" +
                              std::to_string(i) + ", " + std::to_string(j) +
                              ")");
      }
    }
  }
}

double max_off_diagonal(const Matrix& a) {
  double worst = 0.0;
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    for (Eigen::Index q = p + 1; q < a.cols(); ++q) {
      worst = std::max(worst, std::abs(a(p, q)));
    }
  }
  return worst;
}

void check_theta(CriterionKind kind, double theta, std::size_t m) {
  if (m == 0) throw InvalidArgument("bounds: dictionary size must be >= 1");
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw InvalidArgument(std::string(to_string(kind)) +
                          " bounds: measure must be finite and >= 0");
  }
}

// R sqrt(R^2 - delta^2), tolerating delta^2 above R^2 by round-off only.
double distance_spread(double delta, const NormRange& range) {
  const double gap = range.R_sq - delta * delta;
  if (gap < -1e-12 * std::max(1.0, range.R_sq)) {
    throw InvalidArgument("distance bounds: delta^2 exceeds R^2");
  }
  return std::sqrt(range.R_sq) * std::sqrt(std::max(gap, 0.0));
}

}  // namespace

EigenSpectrum eigensolve(const Matrix& input) {
  require_symmetric(input);
  const auto n = input.rows();
  if (n == 0) return {Vector(0), Matrix(0, 0)};
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);

  const double tol = 1e-12 * a.norm();
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (max_off_diagonal(a) <= tol) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  EigenSpectrum out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    Vector col = v.col(src);
    Eigen::Index pivot = 0;
    col.cwiseAbs().maxCoeff(&pivot);
    if (col(pivot) < 0.0) col = -col;
    out.vectors.col(k) = col;
  }
  return out;
}

std::vector<Disc> gersgorin_intervals(const Matrix& a) {
  std::vector<Disc> discs;
  discs.reserve(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double radius = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j != i) radius += std::abs(a(i, j));
    }
    discs.push_back(Disc{a(i, i), radius});
  }
  return discs;
}

bool in_disc_union(const std::vector<Disc>& discs, double value, double slack) {
  return std::any_of(discs.begin(), discs.end(), [&](const Disc& d) {
    return std::abs(value - d.center) <= d.radius + slack;
  });
}

EigenBounds eigen_bounds(CriterionKind kind, double theta, std::size_t m,
                         const NormRange& range) {
  check_theta(kind, theta, m);
  const double others = static_cast<double>(m - 1);
  switch (kind) {
    case CriterionKind::distance: {
      const double spread = others * distance_spread(theta, range);
      return {range.r_sq - spread, range.R_sq + spread};
    }
    case CriterionKind::approximation: {
      const double d2 = theta * theta;
      return {d2, 2.0 * range.R_sq - d2};
    }
    case CriterionKind::coherence: {
      const double spread = others * theta * range.R_sq;
      return {range.r_sq - spread, range.R_sq + spread};
    }
    case CriterionKind::babel:
      return {range.r_sq - theta, range.R_sq + theta};
  }
  return {0.0, 0.0};
}

bool lin_indep_condition(CriterionKind kind, double theta, std::size_t m,
                         const NormRange& range) {
  check_theta(kind, theta, m);
  const double others = static_cast<double>(m - 1);
  switch (kind) {
    case CriterionKind::distance:
      return others * distance_spread(theta, range) < range.r_sq;
    case CriterionKind::approximation:
      return theta > 0.0;
    case CriterionKind::coherence:
      return others * theta * range.R_sq < range.r_sq;
    case CriterionKind::babel:
      return theta < range.r_sq;
  }
  return false;
}

double condition_number_bound(CriterionKind kind, double theta, std::size_t m,
                              const NormRange& range) {
  check_theta(kind, theta, m);
  if (kind == CriterionKind::approximation) {
    if (theta == 0.0) return kInf;
    return 2.0 * range.R_sq / (theta * theta) - 1.0;
  }
  const auto b = eigen_bounds(kind, theta, m, range);
  return b.lower > 0.0 ? b.upper / b.lower : kInf;
}

IsometryConstant isometry_constant(CriterionKind kind, double theta,
                                   std::size_t m, const NormRange& range) {
  check_theta(kind, theta, m);
  if (range.is_unit()) {
    const double others = static_cast<double>(m - 1);
    switch (kind) {
      case CriterionKind::distance:
        return {others * std::sqrt(std::max(1.0 - theta * theta, 0.0)), 1.0};
      case CriterionKind::approximation:
        return {1.0 - theta * theta, 1.0};
      case CriterionKind::coherence:
        return {others * theta, 1.0};
      case CriterionKind::babel:
        return {theta, 1.0};
    }
  }
  const auto b = eigen_bounds(kind, theta, m, range);
  const double sum = b.upper + b.lower;
  if (!(sum > 0.0)) {
    throw NumericalError(std::string(to_string(kind)) +
                         " isometry: vacuous bounds (u + l <= 0)");
  }
  return {(b.upper - b.lower) / sum, std::sqrt(sum / 2.0)};
}

IsometryCheck verify_isometry(const Matrix& gram, double rescale_factor,
                              std::size_t trials, std::uint64_t seed) {
  const auto m = gram.rows();
  if (m < 1 || gram.cols() != m) {
    throw InvalidArgument("verify_isometry: need a non-empty square Gram");
  }
  if (trials < 1) throw InvalidArgument("verify_isometry: trials must be >= 1");
  if (!(rescale_factor > 0.0)) {
    throw InvalidArgument("verify_isometry: rescale factor must be > 0");
  }
  const Matrix scaled = gram / (rescale_factor * rescale_factor);
  const Matrix shifted = scaled - Matrix::Identity(m, m);

  IsometryCheck out{kInf, -kInf, 0.0};
  Vector a(m), b(m), c(m);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    auto draw = [&](Vector& v) {
      do {
        for (Eigen::Index i = 0; i < m; ++i) v(i) = rng.normal();
      } while (v.squaredNorm() == 0.0);
    };
    draw(a);
    const double ratio = a.dot(scaled * a) / a.squaredNorm();
    out.worst_ratio_low = std::min(out.worst_ratio_low, ratio);
    out.worst_ratio_high = std::max(out.worst_ratio_high, ratio);

    draw(b);
    draw(c);
    const double dev = std::abs(b.dot(shifted * c)) / (b.norm() * c.norm());
    out.worst_ip_deviation = std::max(out.worst_ip_deviation, dev);
  }
  return out;
}

const BoundSet& SpectralReport::bounds_for(CriterionKind kind) const {
  for (const auto& b : per_measure) {
    if (b.measure_kind == kind) return b;
  }
  throw InvalidArgument("report has no row for " + std::string(to_string(kind)));
}

double report_measure(const Matrix& gram, CriterionKind kind) {
  if (gram.rows() == 0) throw InvalidArgument("report: empty dictionary");
  if (gram.rows() == 1) {
    switch (kind) {
      case CriterionKind::distance:
      case CriterionKind::approximation:
        return std::sqrt(std::max(gram(0, 0), 0.0));
      case CriterionKind::coherence:
      case CriterionKind::babel:
        return 0.0;
    }
  }
  if (kind == CriterionKind::approximation) {
    try {
      return measure(gram, kind);
    } catch (const NumericalError&) {
      // A singular leave-one-out block means the atoms are dependent, so some
      // atom is reproduced exactly by the others.
      return 0.0;
    }
  }
  return measure(gram, kind);
}

SpectralReport spectral_report(const Matrix& gram, const NormRange& range,
                               std::size_t trials, std::uint64_t seed) {
  SpectralReport report;
  report.spectrum = eigensolve(gram);
  const double lmin = report.spectrum.lambda_min();
  const double lmax = report.spectrum.lambda_max();
  report.condition_number = lmin > 0.0 ? lmax / lmin : kInf;
  const auto m = static_cast<std::size_t>(gram.rows());

  const auto discs = gersgorin_intervals(gram);
  report.gersgorin_ok = true;
  for (Eigen::Index k = 0; k < report.spectrum.values.size(); ++k) {
    const double lambda = report.spectrum.values(k);
    if (!in_disc_union(discs, lambda, kContainmentSlack)) {
      report.gersgorin_ok = false;
      double gap = kInf;
      for (const auto& d : discs) {
        gap = std::min(gap, std::abs(lambda - d.center) - d.radius);
      }
      report.violations.push_back({"gersgorin", gap});
    }
  }

  for (auto kind : kAllCriteria) {
    const std::string name(to_string(kind));
    BoundSet row{};
    row.measure_kind = kind;
    row.measure_value = report_measure(gram, kind);
    const auto b = eigen_bounds(kind, row.measure_value, m, range);
    row.lower = b.lower;
    row.upper = b.upper;
    row.lin_indep_condition_holds =
        lin_indep_condition(kind, row.measure_value, m, range);
    row.cond_number_bound =
        condition_number_bound(kind, row.measure_value, m, range);
    const auto iso = isometry_constant(kind, row.measure_value, m, range);
    row.isometry_nu = iso.nu;
    row.rescale_factor = iso.rescale_factor;
    row.isometry = verify_isometry(gram, iso.rescale_factor, trials, seed);

    auto flag = [&](const char* what, double margin) {
      if (margin > 0.0) {
        report.violations.push_back({name + "." + what, margin});
        row.violated = true;
      }
    };
    flag("lower", row.lower - lmin - kContainmentSlack);
    flag("upper", lmax - row.upper - kContainmentSlack);
    if (std::isfinite(row.cond_number_bound)) {
      flag("cond", report.condition_number -
                       row.cond_number_bound * (1.0 + kContainmentSlack));
    }
    if (row.lin_indep_condition_holds && !(lmin > 0.0)) {
      flag("lin_indep", -lmin + std::numeric_limits<double>::min());
    }
    flag("isometry_low",
         (1.0 - row.isometry_nu) - row.isometry.worst_ratio_low -
             kContainmentSlack);
    flag("isometry_high",
         row.isometry.worst_ratio_high - (1.0 + row.isometry_nu) -
             kContainmentSlack);
    flag("isometry_ip",
         row.isometry.worst_ip_deviation - row.isometry_nu - kContainmentSlack);
    report.per_measure.push_back(row);
  }
  return report;
}

void write_report_csv(std::ostream& os, const SpectralReport& report) {
  os << "kind,measure,lower,upper,lambda_min,lambda_max,cond,cond_bound,nu,"
        "worst_ratio_low,worst_ratio_high,worst_ip_dev,violated\n";
  const double lmin = report.spectrum.lambda_min();
  const double lmax = report.spectrum.lambda_max();
  for (const auto& row : report.per_measure) {
    os << to_string(row.measure_kind) << ',' << format_double(row.measure_value)
       << ',' << format_double(row.lower) << ',' << format_double(row.upper)
       << ',' << format_double(lmin) << ',' << format_double(lmax) << ','
       << format_double(report.condition_number) << ','
       << format_double(row.cond_number_bound) << ','
       << format_double(row.isometry_nu) << ','
       << format_double(row.isometry.worst_ratio_low) << ','
       << format_double(row.isometry.worst_ratio_high) << ','
       << format_double(row.isometry.worst_ip_deviation) << ','
       << (row.violated ? 1 : 0) << '\n';
  }
}

}  // namespace kdict
