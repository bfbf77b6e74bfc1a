#pragma once

// Automatic choice of the gap delta_n for AIC*: the smallest grid value
// whose null-model (k = 0, Sigma = I) false-positive objective mean(k̂^2)
// is within the target budget.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace spikecount {

struct CalibrationSettings {
  std::size_t replications = 500;
  double target = 0.02;
  double grid_step = 0.01;
  double max_delta = 2.0;
  std::size_t candidates = 0;  ///< 0 selects default_candidates(n, p)

  void validate() const;
};

struct CalibrationResult {
  std::size_t p = 0;
  std::size_t n = 0;
  double delta_n = 0.0;
  double srmse_at_delta = 0.0;
  std::size_t replications = 0;
  double grid_step = 0.0;
  double target = 0.0;
  std::uint64_t seed = 0;
  /// Every (delta, SRMSE) pair evaluated by the sweep, in evaluation order.
  std::vector<std::pair<double, double>> trace;
};

/// Simulates `replications` null spectra once, then sweeps delta over
/// {0, step, 2 step, ...} <= max_delta on the cached spectra with a
/// galloping search and linear refinement. Throws ConvergenceError when no
/// grid value meets the target.
CalibrationResult calibrate_delta(std::size_t p, std::size_t n, const CalibrationSettings& settings,
                                  std::uint64_t seed, std::size_t threads = 0);

}  // namespace spikecount
