#include "kdict/dictionary.hpp"

#include "kdict/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kdict {

std::string_view to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::distance:
      return "distance";
    case CriterionKind::approximation:
      return "approximation";
    case CriterionKind::coherence:
      return "coherence";
    case CriterionKind::babel:
      return "babel";
  }
  return "?";
}

CriterionKind parse_criterion(std::string_view name) {
  for (auto kind : kAllCriteria) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidArgument("unknown criterion '" + std::string(name) +
                        "' (expected distance, approximation, coherence or "
                        "babel)");
}

void CriterionConfig::validate() const {
  const std::string name(to_string(kind));
  if (!std::isfinite(threshold)) {
    throw InvalidArgument(name + " criterion: threshold must be finite");
  }
  switch (kind) {
    case CriterionKind::distance:
    case CriterionKind::approximation:
      if (!(threshold > 0.0)) {
        throw InvalidArgument(name + " criterion: delta must be > 0");
      }
      break;
    case CriterionKind::coherence:
      if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw InvalidArgument("coherence criterion: gamma must be in (0, 1]");
      }
      break;
    case CriterionKind::babel:
      if (!(threshold > 0.0)) {
        throw InvalidArgument("babel criterion: gamma must be > 0");
      }
      break;
  }
  if (max_atoms && *max_atoms == 0) {
    throw InvalidArgument("max_atoms must be positive");
  }
}

namespace {

double consistency_residual(const Matrix& gram, const Matrix& inv) {
  const auto m = gram.rows();
  return (gram * inv - Matrix::Identity(m, m)).norm();
}

// Full inverse through Cholesky; empty optional when K is not numerically
// positive definite.
std::optional<Matrix> invert_gram(const Matrix& gram) {
  const auto m = gram.rows();
  if (m == 0) return Matrix(0, 0);
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix inv = llt.solve(Matrix::Identity(m, m));
  inv = 0.5 * (inv + inv.transpose()).eval();
  if (!inv.allFinite() ||
      consistency_residual(gram, inv) > 1e-8 * static_cast<double>(m)) {
    return std::nullopt;
  }
  return inv;
}

void require_non_empty(const Dictionary& dict, const char* what) {
  if (dict.empty()) {
    throw InvalidArgument(std::string(what) + ": dictionary is empty");
  }
}

}  // namespace

Dictionary::Dictionary(KernelSpec kernel, CriterionConfig criterion)
    : kernel_(kernel),
      criterion_(criterion),
      gram_(0, 0),
      gram_inv_(0, 0) {
  criterion_.validate();
}

Dictionary Dictionary::from_atoms(KernelSpec kernel, CriterionConfig criterion,
                                  std::vector<Vector> atoms) {
  Dictionary dict(kernel, criterion);
  if (atoms.empty()) return dict;
  dict.dim_ = static_cast<std::size_t>(atoms.front().size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (static_cast<std::size_t>(atoms[i].size()) != dict.dim_) {
      throw InvalidArgument("from_atoms: atom " + std::to_string(i) +
                            " has the wrong dimension");
    }
    if (!atoms[i].allFinite()) {
      throw InvalidArgument("from_atoms: atom " + std::to_string(i) +
                            " is not finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (atoms[i] == atoms[j]) {
        throw InvalidArgument("from_atoms: atoms " + std::to_string(j) +
                              " and " + std::to_string(i) + " are identical");
      }
    }
  }
  dict.atoms_ = std::move(atoms);
  dict.gram_ = gram_matrix(kernel, dict.atoms_);
  if (auto inv = invert_gram(dict.gram_)) {
    dict.gram_inv_ = std::move(*inv);
    dict.has_inverse_ = true;
  } else {
    dict.gram_inv_.resize(0, 0);
    dict.has_inverse_ = false;
  }
  return dict;
}

const Matrix& Dictionary::gram_inverse() const {
  if (!has_inverse_) {
    throw NumericalError("dictionary Gram matrix is singular");
  }
  return gram_inv_;
}

void Dictionary::check_candidate(const VectorRef& x) const {
  if (!x.allFinite()) throw InvalidArgument("candidate is not finite");
  if (!atoms_.empty() && static_cast<std::size_t>(x.size()) != dim_) {
    throw InvalidArgument("candidate dimension " + std::to_string(x.size()) +
                          " does not match dictionary dimension " +
                          std::to_string(dim_));
  }
}

Vector Dictionary::kernel_vector(const VectorRef& x) const {
  check_candidate(x);
  return kdict::kernel_vector(kernel_, atoms_, x);
}

ProjectionResult Dictionary::project(const VectorRef& x) const {
  require_non_empty(*this, "project");
  const Vector k = kernel_vector(x);
  Vector xi = gram_inverse() * k;
  const double residual = kernel_(x, x) - k.dot(xi);
  return ProjectionResult{std::move(xi), std::max(residual, 0.0)};
}

bool Dictionary::passes_criterion(const VectorRef& x) const {
  switch (criterion_.kind) {
    case CriterionKind::distance:
      return test_distance(*this, x, criterion_.threshold);
    case CriterionKind::approximation:
      return test_approximation(*this, x, criterion_.threshold);
    case CriterionKind::coherence:
      return test_coherence(*this, x, criterion_.threshold);
    case CriterionKind::babel:
      return test_babel(*this, x, criterion_.threshold);
  }
  return false;
}

Admission Dictionary::admit(const VectorRef& x) {
  check_candidate(x);
  if (criterion_.max_atoms && atoms_.size() >= *criterion_.max_atoms) {
    return Admission::rejected;
  }
  for (const auto& atom : atoms_) {
    if (atom == x) return Admission::rejected;
  }
  if (!atoms_.empty() && !passes_criterion(x)) return Admission::rejected;

  const auto m = static_cast<Eigen::Index>(atoms_.size());
  const Vector k = kernel_vector(x);
  const double kxx = kernel_(x, x);

  // Block inverse of [[K, k], [k^T, kxx]] through the Schur complement
  // s = kxx - k^T K^{-1} k.
  const Vector xi = m > 0 ? Vector(gram_inverse() * k) : Vector(0);
  const double pivot = kxx - k.dot(xi);
  if (!(pivot >= kMinSchurPivot)) {
    throw NumericalError(
        "near-singular admission: Schur pivot " + std::to_string(pivot) +
        " below " + std::to_string(kMinSchurPivot) +
        " (threshold too loose for numeric safety)");
  }

  Matrix gram(m + 1, m + 1);
  gram.topLeftCorner(m, m) = gram_;
  gram.col(m).head(m) = k;
  gram.row(m).head(m) = k.transpose();
  gram(m, m) = kxx;

  Matrix inv(m + 1, m + 1);
  inv.topLeftCorner(m, m) = gram_inv_ + (xi * xi.transpose()) / pivot;
  inv.col(m).head(m) = -xi / pivot;
  inv.row(m).head(m) = -xi.transpose() / pivot;
  inv(m, m) = 1.0 / pivot;

  std::size_t since = since_refactor_ + 1;
  bool refresh = since >= kRefactorInterval;
  if (!refresh) {
    // O(m^2) probe on the new column instead of the full O(m^3) residual.
    Vector probe = gram * inv.col(m);
    probe(m) -= 1.0;
    refresh = probe.norm() > 1e-8;
  }
  if (refresh) {
    auto fresh = invert_gram(gram);
    if (!fresh) {
      throw NumericalError(
          "near-singular admission: Gram matrix lost positive definiteness");
    }
    inv = std::move(*fresh);
    since = 0;
  }

  if (atoms_.empty()) dim_ = static_cast<std::size_t>(x.size());
  atoms_.emplace_back(x);
  gram_ = std::move(gram);
  gram_inv_ = std::move(inv);
  since_refactor_ = since;
  return Admission::accepted;
}

double distance_statistic(const Dictionary& dict, const VectorRef& x) {
  require_non_empty(dict, "distance test");
  const Vector k = dict.kernel_vector(x);
  const double kxx = dict.kernel()(x, x);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    const double kjj = dict.gram()(j, j);
    if (!(kjj > 0.0)) {
      throw NumericalError("distance test: atom " + std::to_string(j) +
                           " has zero self-norm");
    }
    best = std::min(best, kxx - k(j) * k(j) / kjj);
  }
  return best;
}

double approximation_statistic(const Dictionary& dict, const VectorRef& x) {
  require_non_empty(dict, "approximation test");
  return dict.project(x).residual_sq;
}

double coherence_statistic(const Dictionary& dict, const VectorRef& x) {
  require_non_empty(dict, "coherence test");
  const double kxx = dict.kernel()(x, x);
  if (!(kxx > 0.0)) {
    throw NumericalError("coherence test: candidate has k(x,x) <= 0");
  }
  const Vector k = dict.kernel_vector(x);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    worst = std::max(worst, std::abs(k(j)) / std::sqrt(kxx * dict.gram()(j, j)));
  }
  return worst;
}

double babel_statistic(const Dictionary& dict, const VectorRef& x) {
  require_non_empty(dict, "babel test");
  return dict.kernel_vector(x).cwiseAbs().sum();
}

bool test_distance(const Dictionary& dict, const VectorRef& x, double delta) {
  return distance_statistic(dict, x) >= delta * delta;
}

bool test_approximation(const Dictionary& dict, const VectorRef& x,
                        double delta) {
  return approximation_statistic(dict, x) >= delta * delta;
}

bool test_coherence(const Dictionary& dict, const VectorRef& x, double gamma) {
  return coherence_statistic(dict, x) <= gamma;
}

bool test_babel(const Dictionary& dict, const VectorRef& x, double gamma) {
  return babel_statistic(dict, x) <= gamma;
}

double measure(const Matrix& gram, CriterionKind kind) {
  const auto m = gram.rows();
  if (gram.cols() != m) throw InvalidArgument("measure: Gram is not square");
  const Eigen::Index min_atoms = kind == CriterionKind::babel ? 1 : 2;
  if (m < min_atoms) {
    throw InvalidArgument(std::string(to_string(kind)) +
                          " measure needs at least " +
                          std::to_string(min_atoms) + " atoms");
  }

  switch (kind) {
    case CriterionKind::distance: {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
          if (i == j) continue;
          if (!(gram(j, j) > 0.0)) {
            throw NumericalError("distance measure: zero atom self-norm");
          }
          const double r = gram(i, i) - gram(i, j) * gram(i, j) / gram(j, j);
          best = std::min(best, r);
        }
      }
      return std::sqrt(std::max(best, 0.0));
    }
    case CriterionKind::approximation: {
      double best = std::numeric_limits<double>::infinity();
      std::vector<Eigen::Index> others;
      others.reserve(static_cast<std::size_t>(m - 1));
      for (Eigen::Index i = 0; i < m; ++i) {
        others.clear();
        for (Eigen::Index j = 0; j < m; ++j) {
          if (j != i) others.push_back(j);
        }
        const Matrix sub = gram(others, others);
        const Vector k = gram(others, Eigen::all).col(i);
        Eigen::LLT<Matrix> llt(sub);
        if (llt.info() != Eigen::Success) {
          throw NumericalError(
              "approximation measure: Gram block without atom " +
              std::to_string(i) + " is singular");
        }
        best = std::min(best, gram(i, i) - k.dot(llt.solve(k)));
      }
      return std::sqrt(std::max(best, 0.0));
    }
    case CriterionKind::coherence: {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
          const double denom = std::sqrt(gram(i, i) * gram(j, j));
          if (!(denom > 0.0)) {
            throw NumericalError("coherence measure: zero atom self-norm");
          }
          worst = std::max(worst, std::abs(gram(i, j)) / denom);
        }
      }
      return worst;
    }
    case CriterionKind::babel: {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
          if (j != i) row += std::abs(gram(i, j));
        }
        worst = std::max(worst, row);
      }
      return worst;
    }
  }
  return 0.0;
}

}  // namespace kdict
