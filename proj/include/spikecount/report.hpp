#pragma once

// Serialization of plans and reports: JSON documents (lossless round trip)
// and tidy CSV tables with a reproducibility header.

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "spikecount/calibration.hpp"
#include "spikecount/estimators.hpp"
#include "spikecount/simulation.hpp"

namespace spikecount {

inline constexpr const char* kVersion = "1.0.0";

/// Shortest decimal that round-trips; "nan"/"inf" for non-finite values.
std::string format_number(double value);

nlohmann::json to_json(const EstimatorSpec& spec);
EstimatorSpec estimator_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CalibrationSettings& settings);
CalibrationSettings calibration_settings_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentPlan& plan);
/// Throws ConfigError on missing/mistyped fields or negative counts.
ExperimentPlan plan_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MonteCarloReport& report);
MonteCarloReport report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CalibrationResult& result);

/// "# spikecount <version>\n# config: <compact json>\n# base_seed: <seed>\n"
std::string header_comment(const nlohmann::json& config, std::uint64_t base_seed);

/// Columns: n,p,estimator,rmse,accuracy,mean_k_hat,reps,seed,failures,delta
void write_report_csv(std::ostream& out, const MonteCarloReport& report);

}  // namespace spikecount
