#include "kdict/error.hpp"
#include "kdict/harness.hpp"
#include "kdict/learners.hpp"
#include "kdict/spectral.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace kdict {
namespace {

Vector vec(std::initializer_list<double> values) {
  Vector x(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) x(i++) = v;
  return x;
}

CriterionConfig coherence(double gamma) {
  return CriterionConfig{CriterionKind::coherence, gamma, std::nullopt};
}

TEST(UpdateLmsIdentity, Cases) {
  const Vector alpha = vec({0.3, -1.0});
  const Vector k = vec({0.2, 0.9});
  EXPECT_EQ(update_lms_identity(alpha, k, 0.0, 0.4, 0.0), alpha);
  EXPECT_EQ(update_lms_identity(Vector::Zero(2), k, 2.0, 0.25, 0.3), 0.5 * k);
  // 1 + 0.1 * (1 * 1 - 0.5 * 1)
  EXPECT_DOUBLE_EQ(update_lms_identity(vec({1}), vec({1}), 1.0, 0.1, 0.5)(0), 1.05);
}

TEST(UpdateLmsGram, ReducesToIdentityVariant) {
  const Vector alpha = vec({0.3, -1.0});
  const Vector k = vec({0.2, 0.9});
  Matrix g(2, 2);
  g << 1.0, 0.4, 0.4, 1.0;
  EXPECT_EQ(update_lms_gram(alpha, k, g, 0.7, 0.3, 0.0),
            update_lms_identity(alpha, k, 0.7, 0.3, 0.0));
  EXPECT_EQ(update_lms_gram(alpha, k, Matrix::Identity(2, 2), 0.7, 0.3, 0.2),
            update_lms_identity(alpha, k, 0.7, 0.3, 0.2));
}

TEST(UpdateLmsGram, HandComputed) {
  Matrix g(2, 2);
  g << 1.0, 0.5, 0.5, 1.0;
  // alpha - 0.1 * K alpha = (1, 0) - 0.1 * (1, 0.5)
  const Vector out = update_lms_gram(vec({1, 0}), vec({1, 0.5}), g, 0.0, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(out(0), 0.9);
  EXPECT_DOUBLE_EQ(out(1), -0.05);
}

TEST(UpdateNlms, Cases) {
  const Vector alpha = vec({0.3, -1.0});
  EXPECT_EQ(update_nlms(alpha, vec({0.2, 0.9}), 0.0, 0.5, 0.0), alpha);
  EXPECT_EQ(update_nlms(vec({0}), vec({1}), 1.0, 1.0, 0.0)(0), 1.0);
  EXPECT_THROW(update_nlms(vec({0}), vec({0}), 1.0, 1.0, 0.0), NumericalError);
}

TEST(UpdateNlms, PostUpdatePredictionInvariantToKernelScale) {
  Rng rng(4);
  const Vector alpha = testing::random_point(rng, 4);
  const Vector k = testing::random_point(rng, 4);
  const double y = 0.8;
  for (double scale : {1.0, 10.0, 0.01}) {
    const Vector ks = scale * k;
    const double e = y - alpha.dot(ks);
    const Vector next = update_nlms(alpha, ks, e, 1.0, 0.0);
    EXPECT_NEAR(next.dot(ks), y, 1e-12);
  }
}

TEST(UpdateFunctional, AtomCandidateTouchesOnlyItsCoefficient) {
  Rng rng(6);
  auto dict = testing::build_dictionary(KernelSpec::gaussian(0.5), coherence(0.5),
                                        rng, 2, 5, 300);
  ASSERT_GE(dict.size(), 3u);
  const Vector alpha = testing::random_point(rng, static_cast<Eigen::Index>(dict.size()));
  const double eta = 0.3, eps = 0.5, e = 1.7;
  const Vector out = update_functional(alpha, dict, dict.atoms()[1], e, eta, eps);
  for (Eigen::Index j = 0; j < alpha.size(); ++j) {
    const double expected = (1 - eta * eps) * alpha(j) + (j == 1 ? eta * e : 0.0);
    EXPECT_NEAR(out(j), expected, 1e-10);
  }
}

TEST(UpdateFunctional, NoErrorNoRegularizationIsIdentity) {
  const auto dict = Dictionary::from_atoms(KernelSpec::gaussian(1.0), coherence(1.0),
                                           {vec({0}), vec({2})});
  const Vector alpha = vec({0.4, -0.2});
  EXPECT_EQ(update_functional(alpha, dict, vec({0.7}), 0.0, 0.9, 0.0), alpha);
}

TEST(UpdateFunctional, ScalarProjection) {
  const auto dict = Dictionary::from_atoms(KernelSpec::gaussian(1.0), coherence(1.0),
                                           {vec({0})});
  const Vector x = vec({std::sqrt(2.0 * std::log(2.0))});  // k(x, atom) = 0.5
  EXPECT_NEAR(update_functional(vec({0}), dict, x, 1.0, 1.0, 0.0)(0), 0.5, 1e-15);
}

TEST(UpdateFunctional, DivergingDecayIsRejected) {
  const auto dict = Dictionary::from_atoms(KernelSpec::gaussian(1.0), coherence(1.0),
                                           {vec({0})});
  EXPECT_THROW(update_functional(vec({0}), dict, vec({1}), 1.0, 2.0, 0.5), NumericalError);
  LearnerConfig cfg{Algorithm::functional_sgd, 2.0, 0.6};
  EXPECT_THROW(cfg.validate(), NumericalError);
}

TEST(Step, FirstSampleIsAdmittedWithZeroPrediction) {
  for (auto algo : {Algorithm::lms_identity, Algorithm::lms_gram, Algorithm::nlms,
                    Algorithm::functional_sgd}) {
    Dictionary dict(KernelSpec::gaussian(1.0), coherence(0.5));
    ModelState state;
    const auto out = step(state, dict, vec({0.3}), 2.5, LearnerConfig{algo, 0.5, 0.1});
    EXPECT_TRUE(out.admitted);
    EXPECT_EQ(out.new_m, 1u);
    EXPECT_EQ(out.prediction, 0.0);
    EXPECT_EQ(out.error, 2.5);
    EXPECT_EQ(state.alpha.size(), 1);
    EXPECT_EQ(state.dict_version, 1u);
  }
}

TEST(Step, RejectionKeepsStateLength) {
  Dictionary dict(KernelSpec::gaussian(1.0), coherence(0.5));
  ModelState state;
  const LearnerConfig cfg{Algorithm::nlms, 0.5, 1e-3};
  step(state, dict, vec({0.0}), 1.0, cfg);
  const auto out = step(state, dict, vec({0.01}), 1.0, cfg);
  EXPECT_FALSE(out.admitted);
  EXPECT_EQ(state.alpha.size(), 1);
  EXPECT_EQ(dict.size(), 1u);
}

TEST(Step, LmsIdentityHandExample) {
  Dictionary dict(KernelSpec::gaussian(1.0), coherence(0.5));
  ModelState state;
  const LearnerConfig cfg{Algorithm::lms_identity, 0.5, 0.0};
  // admit the atom with y = 0 so alpha stays (0)
  step(state, dict, vec({0.0}), 0.0, cfg);
  ASSERT_EQ(state.alpha(0), 0.0);
  const auto out = step(state, dict, vec({0.0}), 1.0, cfg);
  EXPECT_FALSE(out.admitted);
  EXPECT_EQ(out.error, 1.0);
  EXPECT_EQ(state.alpha(0), 0.5);
}

TEST(Step, ErrorsLeaveStateUntouched) {
  Dictionary dict(KernelSpec::linear(), CriterionConfig{CriterionKind::babel, 100.0, {}});
  ModelState state;
  const LearnerConfig cfg{Algorithm::nlms, 0.5, 0.0};
  step(state, dict, vec({1, 0}), 1.0, cfg);
  step(state, dict, vec({0, 1}), 1.0, cfg);
  const Vector alpha = state.alpha;
  EXPECT_THROW(step(state, dict, vec({1, 1}), 1.0, cfg), NumericalError);
  EXPECT_EQ(state.alpha, alpha);
  EXPECT_EQ(dict.size(), 2u);
}

class LearnerInvariants : public ::testing::TestWithParam<Algorithm> {};

TEST_P(LearnerInvariants, DualFunctionalCoherenceAndNormBounds) {
  Rng rng(derive_seed(13, static_cast<std::uint64_t>(GetParam())));
  const auto samples = synthesize("sinc1d", 13, 400);
  Dictionary dict(KernelSpec::gaussian(0.5), coherence(0.6));
  ModelState state;
  const LearnerConfig cfg{GetParam(), 0.3, 0.01};
  for (const auto& s : samples) {
    step(state, dict, s.x, s.y, cfg);
    const Vector z = testing::random_point(rng, 1, 3.0);
    double explicit_sum = 0.0;
    for (std::size_t j = 0; j < dict.size(); ++j) {
      explicit_sum += state.alpha(static_cast<Eigen::Index>(j)) *
                      dict.kernel()(dict.atoms()[j], z);
    }
    EXPECT_NEAR(state.predict(dict, z), explicit_sum, 1e-12);
  }
  const auto spectrum = eigensolve(dict.gram());
  const double a2 = state.alpha.squaredNorm();
  const double psi2 = state.alpha.dot(dict.gram() * state.alpha);
  EXPECT_LE(spectrum.lambda_min() * a2, psi2 + 1e-12);
  EXPECT_LE(psi2, spectrum.lambda_max() * a2 + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Algorithms, LearnerInvariants,
                         ::testing::Values(Algorithm::lms_identity, Algorithm::lms_gram,
                                           Algorithm::nlms, Algorithm::functional_sgd),
                         [](const auto& info) {
                           std::string name(to_string(info.param));
                           std::replace(name.begin(), name.end(), '-', '_');
                           return name;
                         });

TEST(FunctionalUpdate, FidelityIdentityAtEveryStep) {
  const auto samples = synthesize("sinc1d", 21, 300);
  Dictionary dict(KernelSpec::gaussian(0.5), coherence(0.5));
  ModelState state;
  const LearnerConfig cfg{Algorithm::functional_sgd, 0.4, 0.05};
  for (const auto& s : samples) {
    const Vector before = state.alpha;
    const auto out = step(state, dict, s.x, s.y, cfg);
    Vector prev = before;
    if (out.admitted) {
      prev.conservativeResize(prev.size() + 1);
      prev(prev.size() - 1) = 0.0;
    }
    // <psi_t, k(a_j, .)> = (K alpha)_j; projection of k(x,.) evaluated at a_j
    // equals k(x, a_j) when K xi = k(x).
    const Vector lhs = dict.gram() * state.alpha;
    const Vector rhs = (1.0 - cfg.eta * cfg.eps) * (dict.gram() * prev) +
                       cfg.eta * out.error * dict.kernel_vector(s.x);
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Nlms, UnitStepInterpolatesAdmittedSamples) {
  const auto samples = synthesize("sinc1d", 3, 500);
  Dictionary dict(KernelSpec::gaussian(0.5), coherence(0.5));
  ModelState state;
  const LearnerConfig cfg{Algorithm::nlms, 1.0, 0.0};
  for (const auto& s : samples) {
    step(state, dict, s.x, s.y, cfg);
    EXPECT_NEAR(state.predict(dict, s.x), s.y, 1e-10);
  }
}

TEST(Nlms, ConvergesOnTargetInDictionarySpan) {
  // psi*(x) = sum_j w_j k(c_j, x). The centers are fed first and max_atoms
  // freezes the dictionary at exactly those atoms.
  Rng rng(8);
  const auto kernel = KernelSpec::gaussian(0.5);
  std::vector<Vector> centers;
  for (double c = -3.0; c <= 3.0 + 1e-9; c += 0.75) centers.push_back(vec({c}));
  Vector w(static_cast<Eigen::Index>(centers.size()));
  for (Eigen::Index j = 0; j < w.size(); ++j) w(j) = rng.uniform(-1.0, 1.0);

  Dictionary dict(kernel, CriterionConfig{CriterionKind::coherence, 0.9, centers.size()});
  ModelState state;
  const LearnerConfig cfg{Algorithm::nlms, 0.5, 1e-6};
  for (const auto& c : centers) {
    step(state, dict, c, w.dot(kernel_vector(kernel, centers, c)), cfg);
  }
  ASSERT_EQ(dict.size(), centers.size());

  const std::size_t n = 5000;
  double sq = 0.0;
  std::size_t tail = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const Vector x = vec({rng.uniform(-3.0, 3.0)});
    const double y = w.dot(kernel_vector(kernel, centers, x));
    const auto out = step(state, dict, x, y, cfg);
    if (t >= n - n / 10) {
      sq += out.error * out.error;
      ++tail;
    }
  }
  EXPECT_LT(sq / static_cast<double>(tail), 1e-3);
}

}  // namespace
}  // namespace kdict
