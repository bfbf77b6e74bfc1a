#pragma once

// Spiked Gaussian sampling and the seeded Monte-Carlo runner.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spikecount/calibration.hpp"
#include "spikecount/estimators.hpp"
#include "spikecount/rng.hpp"

namespace spikecount {

/// Sigma = diag(spikes..., 1, ..., 1) of dimension p, optionally conjugated
/// by a random orthogonal matrix.
struct SpikedPopulation {
  std::size_t p = 0;
  std::vector<double> spikes;  ///< descending, all > 1
  bool rotate = false;

  std::size_t k() const { return spikes.size(); }
  void validate() const;
};

/// n x p matrix with rows y_i = Sigma^{1/2} x_i, x_i i.i.d. N(0, I_p). The
/// stream is consumed column by column (all n draws of variable 1 first);
/// a rotation draws its p x p Gaussian afterwards.
Eigen::MatrixXd sample_spiked_gaussian(const SpikedPopulation& population, std::size_t n,
                                       Xoshiro256ss& rng);

struct Metrics {
  double rmse = 0.0;      ///< mean(((k̂ - k)/k)^2), or mean(k̂^2) when k = 0
  double accuracy = 0.0;  ///< fraction with k̂ == k
  double mean_k_hat = 0.0;
};

Metrics metrics(std::span<const std::size_t> estimates, std::size_t k_true);

struct ExperimentPlan {
  std::string name = "custom";
  std::vector<double> spikes;
  bool rotate = false;
  double c_target = 1.0;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 100;
  std::vector<EstimatorSpec> estimators;
  std::uint64_t base_seed = 20201;
  CalibrationSettings calibration;

  /// p = round(c_target * n).
  std::size_t p_for(std::size_t n) const;
  /// Throws ConfigError on empty grids/estimator lists, zero replications,
  /// p/n drifting more than 2% from c_target, or invalid spikes.
  void validate() const;
};

struct CellResult {
  std::size_t n = 0;
  std::size_t p = 0;
  std::string estimator;
  EstimatorSpec spec;
  Metrics summary;
  std::size_t replications = 0;  ///< replications that produced an estimate
  std::size_t failures = 0;      ///< replications excluded because the estimator threw
  std::size_t saturations = 0;   ///< gap estimator fell back to s
  std::uint64_t seed = 0;        ///< base seed of this grid cell
  double delta = 0.0;            ///< resolved gap (delta, calibrated delta or delta_n); NaN for PY/AIC
  double alpha = 0.0;            ///< resolved penalty level; NaN for PY
  std::vector<std::size_t> estimates;
};

struct MonteCarloReport {
  ExperimentPlan plan;
  std::size_t k_true = 0;
  std::vector<CellResult> cells;
};

struct RunOptions {
  std::size_t threads = 0;  ///< 0: SPIKECOUNT_THREADS or hardware concurrency
};

/// Stream tags keep data, calibration and rotation streams disjoint.
inline constexpr std::uint64_t kDataStream = 0x5da7a;
inline constexpr std::uint64_t kCalibrationStream = 0xca1b;

/// Seed of replication r at sample size n: derive_seed(base, {kDataStream, n, r}).
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t n, std::size_t r);

/// Runs every estimator on the same simulated spectrum for each replication
/// (paired design). Deterministic in (plan, base_seed) for any thread count.
MonteCarloReport run_monte_carlo(const ExperimentPlan& plan, const RunOptions& options = {});

}  // namespace spikecount
