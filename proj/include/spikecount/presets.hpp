#pragma once

#include <string>
#include <vector>

#include "spikecount/simulation.hpp"

namespace spikecount {

/// Named experiment plans:
///   model-1, model-2  calibrated vs hand-picked delta (c = 1, 400 reps)
///   model-a .. model-c  AIC* (calibrated) vs PY, with classical AIC alongside
///   model-d, model-e    AIC* (calibrated) vs classical AIC
///   table-2             zero-gap estimator, c = 0.5, k = 10, 50 reps
ExperimentPlan preset_plan(const std::string& name);
std::vector<std::string> preset_names();

/// The (p, n) pairs of the delta_n calibration table.
std::vector<std::pair<std::size_t, std::size_t>> calibration_table_pairs();

}  // namespace spikecount
