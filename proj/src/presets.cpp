#include "spikecount/presets.hpp"

#include <cmath>

#include "spikecount/error.hpp"

namespace spikecount {
namespace {

ExperimentPlan comparison(std::string name, std::vector<double> spikes,
                          std::vector<EstimatorSpec> estimators) {
  ExperimentPlan plan;
  plan.name = std::move(name);
  plan.spikes = std::move(spikes);
  plan.c_target = 1.0;
  plan.n_grid = {100, 200, 400, 600, 800, 1000};
  plan.replications = 100;
  plan.estimators = std::move(estimators);
  return plan;
}

ExperimentPlan delta_choice(std::string name, std::vector<double> spikes) {
  std::vector<EstimatorSpec> estimators{EstimatorSpec::aic_star_calibrated()};
  for (double d : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8}) estimators.push_back(EstimatorSpec::aic_star(d));
  ExperimentPlan plan = comparison(std::move(name), std::move(spikes), std::move(estimators));
  plan.replications = 400;
  return plan;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"model-1", "model-2", "model-a", "model-b", "model-c",
          "model-d", "model-e", "table-2"};
}

ExperimentPlan preset_plan(const std::string& name) {
  const auto calibrated = EstimatorSpec::aic_star_calibrated();
  const auto py = EstimatorSpec::passemier_yao();
  const auto aic = EstimatorSpec::aic();
  if (name == "model-1") return delta_choice(name, {4.5, 3.0});
  if (name == "model-2") return delta_choice(name, {3.0, 2.3});
  if (name == "model-a") return comparison(name, {3.5, 2.5}, {calibrated, py, aic});
  if (name == "model-b") return comparison(name, {3.0, 2.1}, {calibrated, py, aic});
  if (name == "model-c") return comparison(name, {3.0, 3.0}, {calibrated, py, aic});
  if (name == "model-d") return comparison(name, {3.5, 3.5}, {calibrated, aic});
  if (name == "model-e") return comparison(name, {4.0, 4.0, 3.5, 3.5, 3.5}, {calibrated, aic});
  if (name == "table-2") {
    ExperimentPlan plan;
    plan.name = name;
    plan.c_target = 0.5;
    plan.spikes.assign(10, 1.0 + std::sqrt(0.5) + 0.5);
    plan.n_grid = {100, 200, 400, 800, 1200, 1500, 2000, 2500, 3200};
    plan.replications = 50;
    plan.estimators = {EstimatorSpec::zero_gap()};
    return plan;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
}

std::vector<std::pair<std::size_t, std::size_t>> calibration_table_pairs() {
  return {{200, 200}, {400, 400}, {1000, 1000}, {200, 400}, {500, 1000}, {400, 500}};
}

}  // namespace spikecount
