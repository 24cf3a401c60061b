#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wonham/filter.hpp"

namespace wonham {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

struct Suite {
  GeneratorMatrix generator = make_generator(Matrix::Constant(2, 2, 1.0));
  ObservationModel model{vec({0, 1}), 0.5};
  ProbabilitySimplex nu{0.5, 0.5};
  ProbabilitySimplex beta{0.9, 0.1};
};

ObservationGrid record(const Suite& s, double horizon, double step, std::uint64_t seed,
                       NoiseMode noise = NoiseMode::On) {
  std::mt19937_64 rng(seed);
  const auto path = sample_path(s.generator, s.nu, horizon, rng);
  return synthesize_observations(path, s.model, step, rng, noise);
}

double sup_gap(const FilterTrajectory& a, const FilterTrajectory& b, std::size_t stride_b = 1) {
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    gap = std::max(gap, (a.values[k].weights() - b.values[k * stride_b].weights()).cwiseAbs().maxCoeff());
  }
  return gap;
}

TEST(Filter, ConstantSensorReducesToKolmogorovFlow) {
  Matrix raw(3, 3);
  raw << 0, 1.0, 0.4, 2.0, 0, 0.6, 0.5, 1.5, 0;
  const auto g = make_generator(raw);
  const ObservationModel flat(vec({1, 1, 1}), 0.5);
  const ProbabilitySimplex init{0.2, 0.3, 0.5};
  std::mt19937_64 rng(3);
  const auto path = sample_path(g, init, 5.0, rng);
  const auto obs = synthesize_observations(path, flat, 1e-3, rng);
  for (auto scheme : {IntegratorScheme::SplitBayes, IntegratorScheme::EulerProjected}) {
    const auto pi = integrate_filter(g, flat, init, obs, scheme);
    ASSERT_EQ(pi.size(), obs.n_steps() + 1);
    double gap = 0.0;
    for (std::size_t k = 0; k < pi.size(); k += 10) {
      const Vector exact = transition_matrix(g, pi.time(k)).transpose() * init.weights();
      gap = std::max(gap, (pi.values[k].weights() - exact).cwiseAbs().sum());
    }
    if (scheme == IntegratorScheme::SplitBayes) {
      EXPECT_LT(gap, 1e-6);
    } else {
      // Euler carries its O(dt) drift error.
      EXPECT_LT(gap, 1e-2);
    }
  }
}

TEST(Filter, DeterministicReplay) {
  const Suite s;
  const auto obs = record(s, 2.0, 1e-3, 10);
  const auto a = integrate_filter(s.generator, s.model, s.nu, obs);
  const auto b = integrate_filter(s.generator, s.model, s.nu, obs);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_TRUE(a.values[k] == b.values[k]);
  EXPECT_TRUE(a.values.front() == s.nu);
}

TEST(Filter, SplitBayesSelfConvergesAtFirstOrder) {
  const Suite s;
  const auto fine = record(s, 5.0, 1e-4, 77);
  const auto mid = coarsen(fine, 10);
  const auto coarse = coarsen(fine, 100);
  const auto pi_fine = integrate_filter(s.generator, s.model, s.beta, fine);
  const auto pi_mid = integrate_filter(s.generator, s.model, s.beta, mid);
  const auto pi_coarse = integrate_filter(s.generator, s.model, s.beta, coarse);
  const double err_coarse = sup_gap(pi_coarse, pi_mid, 10);
  const double err_mid = sup_gap(pi_mid, pi_fine, 10);
  EXPECT_GT(err_coarse, 0.0);
  EXPECT_GE(err_coarse / err_mid, 5.0) << err_coarse << " vs " << err_mid;
}

TEST(Filter, SimplexPreservedByBothSchemes) {
  Matrix raw(3, 3);
  raw << 0, 0.5, 0.5, 1.0, 0, 2.0, 0.3, 0.3, 0;
  const auto g = make_generator(raw);
  const ObservationModel model(vec({-1, 0.5, 2}), 0.3);
  std::mt19937_64 rng(4);
  const auto path = sample_path(g, ProbabilitySimplex{1, 1, 1}, 10.0, rng);
  const auto obs = synthesize_observations(path, model, 1e-3, rng);
  for (auto scheme : {IntegratorScheme::SplitBayes, IntegratorScheme::EulerProjected}) {
    const auto pi = integrate_filter(g, model, ProbabilitySimplex{0.1, 0.1, 0.8}, obs, scheme);
    for (std::size_t k = 1; k < pi.size(); ++k) {
      EXPECT_NEAR(pi.values[k].weights().sum(), 1.0, 1e-10);
      EXPECT_GT(pi.values[k].weights().minCoeff(), 0.0);
    }
  }
}

TEST(Filter, SchemesAgreeWithinDiscretizationBudget) {
  const Suite s;
  const double step = 1e-3, horizon = 10.0;
  const auto obs = record(s, horizon, step, 2024);
  const auto split = integrate_filter(s.generator, s.model, s.beta, obs, IntegratorScheme::SplitBayes);
  const auto euler =
      integrate_filter(s.generator, s.model, s.beta, obs, IntegratorScheme::EulerProjected);
  const double hmax = s.model.h.cwiseAbs().maxCoeff();
  const double budget =
      10.0 * step * horizon * (s.generator.inf_norm() + hmax * hmax / (s.model.sigma * s.model.sigma));
  EXPECT_LT(sup_gap(split, euler), budget);
}

TEST(Filter, SensorShiftIsAGauge) {
  const Suite s;
  const double c = 2.5;
  const auto obs = record(s, 5.0, 1e-3, 9);
  ObservationGrid shifted = obs;
  for (double& dy : shifted.increments) dy += c * obs.step;
  const ObservationModel moved(s.model.h.array() + c, s.model.sigma);
  const auto a = integrate_filter(s.generator, s.model, s.beta, obs);
  const auto b = integrate_filter(s.generator, moved, s.beta, shifted);
  EXPECT_LT(sup_gap(a, b), 1e-10);
}

TEST(Filter, SplitBayesReportsUnderflow) {
  const auto g = make_generator(Matrix::Constant(2, 2, 1.0));
  const ObservationModel sharp(vec({0, 10}), 0.01);
  std::mt19937_64 rng(5);
  const auto path = sample_path(g, ProbabilitySimplex{0.5, 0.5}, 10.0, rng);
  const auto obs = synthesize_observations(path, sharp, 0.1, rng);
  try {
    integrate_filter(g, sharp, ProbabilitySimplex{0.5, 0.5}, obs);
    FAIL() << "expected DegenerateState";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateState);
  }
  // Euler floors instead of failing.
  const auto euler = integrate_filter(g, sharp, ProbabilitySimplex{0.5, 0.5}, obs,
                                      IntegratorScheme::EulerProjected);
  for (const auto& p : euler.values) {
    EXPECT_GT(p.weights().minCoeff(), 0.0);
    EXPECT_NEAR(p.weights().sum(), 1.0, 1e-10);
  }
}

TEST(Filter, RejectsBadInputs) {
  const Suite s;
  const auto obs = record(s, 1.0, 1e-2, 1);
  EXPECT_THROW(integrate_filter(s.generator, s.model, ProbabilitySimplex{1.0, 0.0}, obs), Error);
  EXPECT_THROW(integrate_filter(s.generator, ObservationModel(vec({0, 1, 2}), 1.0), s.nu, obs), Error);
}

TEST(TvDistance, Examples) {
  const ProbabilitySimplex p{0.6, 0.4};
  EXPECT_EQ(tv_distance(p, p), 0.0);
  EXPECT_EQ(tv_distance(ProbabilitySimplex{1, 0}, ProbabilitySimplex{0, 1}), 2.0);
  EXPECT_NEAR(tv_distance(p, ProbabilitySimplex{0.5, 0.5}), 0.2, 1e-15);
  try {
    tv_distance(p, ProbabilitySimplex{1, 1, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(TvDistance, IsAMetricOnRandomTriples) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&] { return ProbabilitySimplex{u(rng), u(rng), u(rng), u(rng)}; };
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = draw(), q = draw(), r = draw();
    EXPECT_EQ(tv_distance(p, q), tv_distance(q, p));
    EXPECT_LE(tv_distance(p, r), tv_distance(p, q) + tv_distance(q, r) + 1e-15);
    EXPECT_LE(tv_distance(p, q), 2.0);
  }
}

TEST(LikelihoodRatio, Examples) {
  const ProbabilitySimplex nu{0.5, 0.5};
  EXPECT_DOUBLE_EQ(likelihood_ratio_constant(nu, nu), 4.0);
  EXPECT_NEAR(likelihood_ratio_constant(ProbabilitySimplex{0.9, 0.1}, nu), 36.0, 1e-12);
  const ProbabilitySimplex three{0.2, 0.3, 0.5};
  EXPECT_DOUBLE_EQ(likelihood_ratio_constant(three, three), 9.0);
}

TEST(LikelihoodRatio, AtLeastDSquared) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const ProbabilitySimplex a{u(rng), u(rng), u(rng)};
    const ProbabilitySimplex b{u(rng), u(rng), u(rng)};
    EXPECT_GE(likelihood_ratio_constant(a, b), 9.0 * (1.0 - 1e-15));
  }
}

TEST(LikelihoodRatio, RejectsZeroEntries) {
  try {
    likelihood_ratio_constant(ProbabilitySimplex{1.0, 0.0}, ProbabilitySimplex{0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotEquivalent);
  }
}

TEST(Scheme, ParsesNames) {
  EXPECT_EQ(parse_scheme("split_bayes"), IntegratorScheme::SplitBayes);
  EXPECT_EQ(parse_scheme("euler_projected"), IntegratorScheme::EulerProjected);
  EXPECT_THROW(parse_scheme("rk4"), Error);
}

}  // namespace
}  // namespace wonham
