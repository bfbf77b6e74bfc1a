#include "spikecount/calibration.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "spikecount/estimators.hpp"
#include "spikecount/parallel.hpp"
#include "spikecount/rmt.hpp"
#include "spikecount/simulation.hpp"

namespace spikecount {

void CalibrationSettings::validate() const {
  if (replications < 1) throw ConfigError("calibration: replications must be at least 1");
  if (!(target > 0.0)) throw ConfigError("calibration: target must be positive");
  if (!(grid_step > 0.0) || !std::isfinite(grid_step))
    throw ConfigError("calibration: grid step must be positive");
  if (!(max_delta >= 0.0) || !std::isfinite(max_delta))
    throw ConfigError("calibration: max delta must be finite and >= 0");
}

CalibrationResult calibrate_delta(std::size_t p, std::size_t n, const CalibrationSettings& settings,
                                  std::uint64_t seed, std::size_t threads) {
  settings.validate();
  if (p < 2 || n < 3) throw ConfigError("calibration: needs p >= 2 and n >= 3");
  const std::size_t q = settings.candidates ? settings.candidates : default_candidates(n, p);
  const Ratio ratio = Ratio::from_shape(p, n);

  // Null spectra are simulated once; only alpha changes across the sweep.
  std::vector<CriterionTerms> terms(settings.replications);
  const SpikedPopulation null_population{p, {}, false};
  parallel_for(settings.replications, threads, [&](std::size_t r) {
    Xoshiro256ss rng(derive_seed(seed, {kCalibrationStream, p, n, r}));
    const Eigen::MatrixXd y = sample_spiked_gaussian(null_population, n, rng);
    terms[r] = criterion_terms(sample_spectrum(y, Divisor::NMinus1), n, p, q);
  });

  CalibrationResult result;
  result.p = p;
  result.n = n;
  result.replications = settings.replications;
  result.grid_step = settings.grid_step;
  result.target = settings.target;
  result.seed = seed;

  auto srmse_at = [&](std::size_t index) {
    const double delta = settings.grid_step * static_cast<double>(index);
    const double alpha = penalty_alpha(ratio, delta);
    double total = 0.0;
    for (const auto& t : terms) {
      const Eigen::VectorXd values = t.values(alpha);
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < values.size(); ++j)
        if (values(j) < values(best)) best = j;
      total += static_cast<double>(best * best);
    }
    const double s = total / static_cast<double>(terms.size());
    result.trace.emplace_back(delta, s);
    return s;
  };
  auto check_monotone = [](double lower_delta_value, double higher_delta_value) {
    if (higher_delta_value > lower_delta_value)
      throw std::logic_error("calibration: SRMSE increased with delta");
  };
  auto finish = [&](std::size_t index, double s) {
    result.delta_n = settings.grid_step * static_cast<double>(index);
    result.srmse_at_delta = s;
    return result;
  };

  const auto last = static_cast<std::size_t>(std::floor(settings.max_delta / settings.grid_step + 1e-9));

  // Galloping: 0, 1, 2, 4, 8, ... until the budget is met.
  double fail_value = srmse_at(0);
  if (fail_value <= settings.target) return finish(0, fail_value);
  std::size_t fail_index = 0;
  std::size_t probe = 1;
  std::size_t pass_index = 0;
  double pass_value = std::numeric_limits<double>::infinity();
  while (true) {
    const std::size_t index = std::min(probe, last);
    const double s = srmse_at(index);
    check_monotone(fail_value, s);
    if (s <= settings.target) {
      pass_index = index;
      pass_value = s;
      break;
    }
    fail_index = index;
    fail_value = s;
    if (index == last) {
      std::ostringstream os;
      os << "calibration: no delta <= " << settings.max_delta << " reaches SRMSE <= "
         << settings.target << " (SRMSE at max delta " << s << ")";
      throw ConvergenceError(os.str());
    }
    probe *= 2;
  }

  // Linear refinement between the last failing and the first passing probe.
  for (std::size_t index = fail_index + 1; index < pass_index; ++index) {
    const double s = srmse_at(index);
    check_monotone(fail_value, s);
    check_monotone(s, pass_value);
    if (s <= settings.target) return finish(index, s);
    fail_value = s;
  }
  return finish(pass_index, pass_value);
}

}  // namespace spikecount
