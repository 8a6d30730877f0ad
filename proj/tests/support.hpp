#pragma once

// Shared fixtures for the unit and acceptance suites. Everything here is
// written against Eigen directly, independent of the library's own solvers.

#include "kdict/dictionary.hpp"
#include "kdict/error.hpp"
#include "kdict/kernel.hpp"
#include "kdict/random.hpp"

#include <Eigen/Eigenvalues>

#include <vector>

namespace kdict::testing {

inline Vector random_point(Rng& rng, Eigen::Index dim, double spread = 1.0) {
  Vector x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x(i) = rng.uniform(-spread, spread);
  return x;
}

inline std::vector<Vector> random_points(Rng& rng, std::size_t count,
                                         Eigen::Index dim,
                                         double spread = 1.0) {
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_point(rng, dim, spread));
  }
  return out;
}

/// Streams random candidates through admit() until `target` atoms are held or
/// `max_offers` candidates were offered. Candidates refused as near-singular
/// count as rejections; admit() leaves the dictionary untouched in that case.
inline Dictionary build_dictionary(const KernelSpec& kernel,
                                   const CriterionConfig& criterion, Rng& rng,
                                   Eigen::Index dim, std::size_t target,
                                   std::size_t max_offers, double spread = 1.0) {
  Dictionary dict(kernel, criterion);
  for (std::size_t i = 0; i < max_offers && dict.size() < target; ++i) {
    try {
      dict.admit(random_point(rng, dim, spread));
    } catch (const NumericalError&) {
    }
  }
  return dict;
}

/// Reference spectrum (ascending) from Eigen's tridiagonal QR solver.
inline Vector reference_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace kdict::testing
