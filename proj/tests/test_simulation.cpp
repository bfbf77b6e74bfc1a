#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "spikecount/calibration.hpp"
#include "spikecount/simulation.hpp"
#include "spikecount/spectra.hpp"

using namespace spikecount;

TEST(Rng, SeedDerivationSeparatesCoordinates) {
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(1, {2, 0}));
  EXPECT_EQ(derive_seed(99, {4, 5, 6}), derive_seed(99, {4, 5, 6}));
  static_assert(mix64(0) == 0);
  // Reference output of the SplitMix64 generator seeded with 0: its first
  // draw is mix64(golden ratio increment).
  EXPECT_EQ(mix64(0x9e3779b97f4a7c15ULL), 0xe220a8397b1dcdafULL);
}

TEST(Rng, UniformsStayInOpenInterval) {
  Xoshiro256ss rng(123);
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, NormalQuantileMatchesReference) {
  const boost::math::normal_distribution<double> ref;
  for (double p : {1e-300, 1e-20, 1e-10, 1e-5, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575,
                   0.999, 1 - 1e-10}) {
    const double z = boost::math::quantile(ref, p);
    EXPECT_NEAR(normal_quantile(p), z, 1e-14 * std::max(1.0, std::abs(z))) << p;
  }
}

TEST(Rng, NormalMoments) {
  Xoshiro256ss rng(7);
  const int n = 200000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  EXPECT_NEAR(m1 / n, 0.0, 0.01);
  EXPECT_NEAR(m2 / n, 1.0, 0.015);
  EXPECT_NEAR(m4 / n, 3.0, 0.08);
}

TEST(Sampling, NullColumnsHaveUnitVariance) {
  Xoshiro256ss rng(derive_seed(5, {1}));
  const std::size_t n = 4000;
  const Eigen::MatrixXd y = sample_spiked_gaussian({6, {}, false}, n, rng);
  for (Eigen::Index j = 0; j < 6; ++j)
    EXPECT_NEAR(y.col(j).squaredNorm() / n, 1.0, 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Sampling, FixedDimensionConsistency) {
  Xoshiro256ss rng(derive_seed(8, {2}));
  const Eigen::MatrixXd y = sample_spiked_gaussian({2, {9.0}, false}, 20000, rng);
  EXPECT_NEAR(sample_spectrum(y, Divisor::NMinus1)[0], 9.0, 0.35);
  Xoshiro256ss rng2(derive_seed(8, {3}));
  const Eigen::MatrixXd yr = sample_spiked_gaussian({2, {9.0}, true}, 20000, rng2);
  EXPECT_NEAR(sample_spectrum(yr, Divisor::NMinus1)[0], 9.0, 0.35);
}

TEST(Sampling, DeterministicForSeed) {
  Xoshiro256ss a(42), b(42);
  const SpikedPopulation pop{10, {4.0, 2.5}, true};
  const Eigen::MatrixXd ya = sample_spiked_gaussian(pop, 30, a);
  const Eigen::MatrixXd yb = sample_spiked_gaussian(pop, 30, b);
  EXPECT_EQ(std::memcmp(ya.data(), yb.data(), sizeof(double) * ya.size()), 0);
}

TEST(Sampling, RejectsBadPopulation) {
  Xoshiro256ss rng(1);
  EXPECT_THROW(sample_spiked_gaussian({3, {0.9}, false}, 10, rng), ConfigError);
  EXPECT_THROW(sample_spiked_gaussian({3, {2.0, 3.0}, false}, 10, rng), ConfigError);
  EXPECT_THROW(sample_spiked_gaussian({2, {2.0, 1.5}, false}, 10, rng), ConfigError);
}

TEST(Metrics, HandArithmetic) {
  const std::vector<std::size_t> exact = {3, 3, 3};
  auto m = metrics(exact, 3);
  EXPECT_EQ(m.rmse, 0.0);
  EXPECT_EQ(m.accuracy, 1.0);
  const std::vector<std::size_t> off = {1, 3};
  m = metrics(off, 2);
  EXPECT_DOUBLE_EQ(m.rmse, 0.25);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.0);
  EXPECT_DOUBLE_EQ(m.mean_k_hat, 2.0);
  const std::vector<std::size_t> null = {0, 1};
  m = metrics(null, 0);
  EXPECT_DOUBLE_EQ(m.rmse, 0.5);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
}

TEST(MonteCarlo, EstimatorFindsStrongSpike) {
  ExperimentPlan plan;
  plan.spikes = {10.0};
  plan.c_target = 0.1;
  plan.n_grid = {1000};
  plan.replications = 20;
  plan.estimators = {EstimatorSpec::aic()};
  const auto report = run_monte_carlo(plan);
  ASSERT_EQ(report.cells.size(), 1u);
  EXPECT_EQ(report.cells[0].p, 100u);
  EXPECT_GE(report.cells[0].summary.accuracy, 0.9);
}

TEST(MonteCarlo, SingleReplicationEchoesEstimate) {
  ExperimentPlan plan;
  plan.spikes = {6.0, 4.0};
  plan.c_target = 0.5;
  plan.n_grid = {80};
  plan.replications = 1;
  plan.estimators = {EstimatorSpec::aic()};
  const auto report = run_monte_carlo(plan);
  const auto& cell = report.cells.at(0);
  ASSERT_EQ(cell.estimates.size(), 1u);

  Xoshiro256ss rng(replication_seed(plan.base_seed, 80, 0));
  const Eigen::MatrixXd y = sample_spiked_gaussian({40, plan.spikes, false}, 80, rng);
  EXPECT_EQ(cell.estimates[0], estimate_spikes(y, EstimatorSpec::aic()).k_hat);
  EXPECT_DOUBLE_EQ(cell.summary.mean_k_hat, static_cast<double>(cell.estimates[0]));
}

TEST(MonteCarlo, IndependentOfThreadCount) {
  ExperimentPlan plan;
  plan.spikes = {3.5, 2.5};
  plan.c_target = 1.0;
  plan.n_grid = {60, 100};
  plan.replications = 12;
  plan.estimators = {EstimatorSpec::aic(), EstimatorSpec::aic_star(0.4),
                     EstimatorSpec::passemier_yao(), EstimatorSpec::aic_double_star()};
  const auto one = run_monte_carlo(plan, RunOptions{1});
  const auto four = run_monte_carlo(plan, RunOptions{4});
  ASSERT_EQ(one.cells.size(), four.cells.size());
  for (std::size_t i = 0; i < one.cells.size(); ++i) EXPECT_EQ(one.cells[i].estimates, four.cells[i].estimates);
}

TEST(MonteCarlo, PlanValidation) {
  ExperimentPlan plan;
  plan.spikes = {3.0};
  plan.n_grid = {100};
  EXPECT_THROW(plan.validate(), ConfigError);  // no estimators
  plan.estimators = {EstimatorSpec::aic()};
  plan.replications = 0;
  EXPECT_THROW(plan.validate(), ConfigError);
  plan.replications = 5;
  plan.c_target = 0.013;
  plan.n_grid = {10};
  EXPECT_THROW(plan.validate(), ConfigError);  // p/n cannot match c
}

TEST(Calibration, InfiniteBudgetTakesFirstGridPoint) {
  CalibrationSettings s;
  s.replications = 10;
  s.target = std::numeric_limits<double>::infinity();
  const auto r = calibrate_delta(20, 40, s, 3);
  EXPECT_EQ(r.delta_n, 0.0);
}

TEST(Calibration, SmallestQualifyingGridPoint) {
  CalibrationSettings s;
  s.replications = 60;
  const auto r = calibrate_delta(30, 60, s, 77);
  EXPECT_LE(r.srmse_at_delta, s.target);
  // Every evaluated grid point below the answer missed the budget.
  for (const auto& [d, v] : r.trace) {
    if (d < r.delta_n - 1e-12) {
      EXPECT_GT(v, s.target) << d;
    }
  }
  const auto again = calibrate_delta(30, 60, s, 77, 3);
  EXPECT_EQ(again.delta_n, r.delta_n);
  EXPECT_EQ(again.srmse_at_delta, r.srmse_at_delta);

  // The grid point one step below was evaluated and failed.
  if (r.delta_n > 0) {
    bool seen = false;
    for (const auto& [d, v] : r.trace)
      if (std::abs(d - (r.delta_n - s.grid_step)) < 1e-9) seen = true;
    EXPECT_TRUE(seen);
  }
}

TEST(Calibration, TraceIsMonotone) {
  CalibrationSettings s;
  s.replications = 40;
  const auto r = calibrate_delta(25, 25, s, 5);
  auto trace = r.trace;
  std::sort(trace.begin(), trace.end());
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i].second, trace[i - 1].second);
}

TEST(Calibration, Errors) {
  CalibrationSettings s;
  s.replications = 50;
  s.target = 0.0;
  EXPECT_THROW(calibrate_delta(20, 20, s, 1), ConfigError);
  s.target = 1e-9;
  s.max_delta = 0.02;
  EXPECT_THROW(calibrate_delta(20, 20, s, 1), ConvergenceError);
  s = CalibrationSettings{};
  EXPECT_THROW(calibrate_delta(1, 20, s, 1), ConfigError);
}
