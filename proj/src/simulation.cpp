#include "spikecount/simulation.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "spikecount/parallel.hpp"
#include "spikecount/spectra.hpp"

namespace spikecount {

void SpikedPopulation::validate() const {
  if (p == 0) throw ConfigError("population dimension must be positive");
  if (spikes.size() >= p) throw ConfigError("number of spikes must be below p");
  for (std::size_t i = 0; i < spikes.size(); ++i) {
    if (!(spikes[i] > 1.0) || !std::isfinite(spikes[i]))
      throw ConfigError("spikes must be finite and exceed 1");
    if (i > 0 && spikes[i] > spikes[i - 1]) throw ConfigError("spikes must be in descending order");
  }
}

Eigen::MatrixXd sample_spiked_gaussian(const SpikedPopulation& population, std::size_t n,
                                       Xoshiro256ss& rng) {
  population.validate();
  if (n < 2) throw ConfigError("sample size must be at least 2");
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(population.p);
  Eigen::MatrixXd y(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) y(i, j) = rng.normal();
  for (std::size_t j = 0; j < population.k(); ++j)
    y.col(static_cast<Eigen::Index>(j)) *= std::sqrt(population.spikes[j]);

  if (population.rotate) {
    Eigen::MatrixXd g(cols, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < cols; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Sign fix makes Q Haar distributed.
    const Eigen::MatrixXd& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < cols; ++j)
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    y = y * q.transpose();
  }
  return y;
}

Metrics metrics(std::span<const std::size_t> estimates, std::size_t k_true) {
  if (estimates.empty()) throw ConfigError("metrics: no estimates");
  double se = 0.0, hits = 0.0, sum = 0.0;
  const double k = static_cast<double>(k_true);
  for (std::size_t e : estimates) {
    const double kh = static_cast<double>(e);
    const double err = k_true == 0 ? kh : (kh - k) / k;
    se += err * err;
    hits += e == k_true ? 1.0 : 0.0;
    sum += kh;
  }
  const double count = static_cast<double>(estimates.size());
  return {se / count, hits / count, sum / count};
}

std::size_t ExperimentPlan::p_for(std::size_t n) const {
  return static_cast<std::size_t>(std::llround(c_target * static_cast<double>(n)));
}

void ExperimentPlan::validate() const {
  if (n_grid.empty()) throw ConfigError("plan: n_grid is empty");
  if (estimators.empty()) throw ConfigError("plan: no estimators");
  if (replications < 1) throw ConfigError("plan: replications must be at least 1");
  if (!(c_target > 0.0) || !std::isfinite(c_target)) throw ConfigError("plan: c must be positive");
  for (const auto& e : estimators) e.validate();
  calibration.validate();
  for (std::size_t n : n_grid) {
    if (n < 3) throw ConfigError("plan: every n must be at least 3");
    const std::size_t p = p_for(n);
    const double ratio = static_cast<double>(p) / static_cast<double>(n);
    if (p < 2 || std::abs(ratio - c_target) > 0.02 * c_target) {
      std::ostringstream os;
      os << "plan: n = " << n << " gives p/n = " << ratio << ", more than 2% from c = " << c_target;
      throw ConfigError(os.str());
    }
    SpikedPopulation{p, spikes, rotate}.validate();
  }
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t n, std::size_t r) {
  return derive_seed(base_seed, {kDataStream, n, r});
}

namespace {

struct Outcome {
  std::optional<std::size_t> k_hat;
  bool saturated = false;
};

}  // namespace

MonteCarloReport run_monte_carlo(const ExperimentPlan& plan, const RunOptions& options) {
  plan.validate();
  MonteCarloReport report;
  report.plan = plan;
  report.k_true = plan.spikes.size();
  const std::size_t m = plan.estimators.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t n : plan.n_grid) {
    const std::size_t p = plan.p_for(n);
    const SpikedPopulation population{p, plan.spikes, plan.rotate};

    // Resolve calibrated gaps once per shape.
    std::vector<EstimatorSpec> resolved = plan.estimators;
    std::vector<double> deltas(m, nan), alphas(m, nan);
    for (std::size_t e = 0; e < m; ++e) {
      EstimatorSpec& spec = resolved[e];
      if (spec.calibrated) {
        const auto cal = calibrate_delta(p, n, plan.calibration,
                                         derive_seed(plan.base_seed, {kCalibrationStream, p, n}),
                                         options.threads);
        spec.delta = cal.delta_n;
        spec.calibrated = false;
      }
      if (spec.kind == EstimatorKind::AicStar) deltas[e] = spec.delta;
      if (spec.kind == EstimatorKind::AicDoubleStar) deltas[e] = spec.delta_schedule(n);
      if (spec.kind != EstimatorKind::PassemierYao) alphas[e] = resolve_alpha(spec, n, p);
    }

    std::vector<Outcome> outcomes(plan.replications * m);
    parallel_for(plan.replications, options.threads, [&](std::size_t r) {
      Xoshiro256ss rng(replication_seed(plan.base_seed, n, r));
      const Eigen::MatrixXd y = sample_spiked_gaussian(population, n, rng);
      const EigenSpectrum spectrum = sample_spectrum(y, Divisor::NMinus1);
      for (std::size_t e = 0; e < m; ++e) {
        Outcome& out = outcomes[r * m + e];
        try {
          const SelectionResult res = estimate_spikes(spectrum, n, p, resolved[e]);
          out.k_hat = res.k_hat;
          out.saturated = res.saturated;
        } catch (const std::exception&) {
          out.k_hat.reset();
        }
      }
    });

    for (std::size_t e = 0; e < m; ++e) {
      CellResult cell;
      cell.n = n;
      cell.p = p;
      cell.spec = plan.estimators[e];
      cell.estimator = plan.estimators[e].label();
      cell.seed = derive_seed(plan.base_seed, {kDataStream, n});
      cell.delta = deltas[e];
      cell.alpha = alphas[e];
      for (std::size_t r = 0; r < plan.replications; ++r) {
        const Outcome& out = outcomes[r * m + e];
        if (!out.k_hat) {
          ++cell.failures;
          continue;
        }
        cell.estimates.push_back(*out.k_hat);
        if (out.saturated) ++cell.saturations;
      }
      cell.replications = cell.estimates.size();
      if (!cell.estimates.empty()) cell.summary = metrics(cell.estimates, report.k_true);
      else cell.summary = {nan, nan, nan};
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace spikecount
