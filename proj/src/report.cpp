#include "spikecount/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "spikecount/error.hpp"

namespace spikecount {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

double number_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::size_t count_field(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) throw ConfigError(std::string("'") + key + "' must not be negative");
  return static_cast<std::size_t>(s);
}

double real_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

json to_json(const EstimatorSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case EstimatorKind::Aic:
      break;
    case EstimatorKind::AicStar:
      if (spec.calibrated) j["delta"] = "calibrated";
      else j["delta"] = spec.delta;
      break;
    case EstimatorKind::AicDoubleStar:
      j["gamma"] = spec.delta_schedule.scale;
      j["exponent"] = spec.delta_schedule.exponent;
      break;
    case EstimatorKind::PassemierYao:
      j["beta"] = spec.dn_schedule.scale;
      j["exponent"] = spec.dn_schedule.exponent;
      break;
  }
  if (spec.candidates) j["candidates"] = spec.candidates;
  return j;
}

EstimatorSpec estimator_from_json(const json& j) {
  if (j.is_string()) return parse_estimator(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError("estimator entry needs a string 'kind'");
  EstimatorSpec spec = parse_estimator(j.at("kind").get<std::string>());
  switch (spec.kind) {
    case EstimatorKind::Aic:
      break;
    case EstimatorKind::AicStar:
      if (j.contains("delta")) {
        const json& d = j.at("delta");
        if (d.is_string()) {
          if (d.get<std::string>() != "calibrated")
            throw ConfigError("'delta' must be a number or \"calibrated\"");
          spec.calibrated = true;
        } else {
          spec.delta = real_field(j, "delta", 0.0);
          spec.calibrated = false;
        }
      }
      break;
    case EstimatorKind::AicDoubleStar:
      spec.delta_schedule.scale = real_field(j, "gamma", spec.delta_schedule.scale);
      spec.delta_schedule.exponent = real_field(j, "exponent", spec.delta_schedule.exponent);
      break;
    case EstimatorKind::PassemierYao:
      spec.dn_schedule.scale = real_field(j, "beta", spec.dn_schedule.scale);
      spec.dn_schedule.exponent = real_field(j, "exponent", spec.dn_schedule.exponent);
      break;
  }
  spec.candidates = count_field(j, "candidates", 0);
  spec.validate();
  return spec;
}

json to_json(const CalibrationSettings& s) {
  return {{"replications", s.replications},
          {"target", s.target},
          {"grid_step", s.grid_step},
          {"max_delta", s.max_delta},
          {"candidates", s.candidates}};
}

CalibrationSettings calibration_settings_from_json(const json& j) {
  CalibrationSettings s;
  if (j.is_null()) return s;
  if (!j.is_object()) throw ConfigError("'calibration' must be an object");
  s.replications = count_field(j, "replications", s.replications);
  s.target = real_field(j, "target", s.target);
  s.grid_step = real_field(j, "grid_step", s.grid_step);
  s.max_delta = real_field(j, "max_delta", s.max_delta);
  s.candidates = count_field(j, "candidates", s.candidates);
  s.validate();
  return s;
}

json to_json(const ExperimentPlan& plan) {
  json estimators = json::array();
  for (const auto& e : plan.estimators) estimators.push_back(to_json(e));
  return {{"name", plan.name},
          {"spikes", plan.spikes},
          {"rotate", plan.rotate},
          {"c", plan.c_target},
          {"n_grid", plan.n_grid},
          {"replications", plan.replications},
          {"estimators", estimators},
          {"base_seed", plan.base_seed},
          {"calibration", to_json(plan.calibration)}};
}

ExperimentPlan plan_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("plan must be a JSON object");
  ExperimentPlan plan;
  try {
    plan.name = j.value("name", plan.name);
    if (j.contains("spikes")) plan.spikes = j.at("spikes").get<std::vector<double>>();
    plan.rotate = j.value("rotate", false);
    plan.c_target = real_field(j, "c", plan.c_target);
    if (!j.contains("n_grid") || !j.at("n_grid").is_array())
      throw ConfigError("plan needs an 'n_grid' array");
    for (const auto& v : j.at("n_grid")) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 3)
        throw ConfigError("'n_grid' entries must be integers >= 3");
      plan.n_grid.push_back(v.get<std::size_t>());
    }
    if (j.contains("replications")) {
      const json& r = j.at("replications");
      if (!r.is_number_integer() || r.get<std::int64_t>() < 1)
        throw ConfigError("'replications' must be a positive integer");
    }
    plan.replications = count_field(j, "replications", plan.replications);
    if (!j.contains("estimators") || !j.at("estimators").is_array())
      throw ConfigError("plan needs an 'estimators' array");
    for (const auto& e : j.at("estimators")) plan.estimators.push_back(estimator_from_json(e));
    if (j.contains("base_seed")) {
      const json& s = j.at("base_seed");
      if (!s.is_number_integer()) throw ConfigError("'base_seed' must be an integer");
      plan.base_seed = s.is_number_unsigned() ? s.get<std::uint64_t>()
                                              : static_cast<std::uint64_t>(s.get<std::int64_t>());
    }
    plan.calibration = calibration_settings_from_json(j.value("calibration", json()));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

json to_json(const MonteCarloReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"n", c.n},
                     {"p", c.p},
                     {"estimator", c.estimator},
                     {"spec", to_json(c.spec)},
                     {"rmse", c.summary.rmse},
                     {"accuracy", c.summary.accuracy},
                     {"mean_k_hat", c.summary.mean_k_hat},
                     {"reps", c.replications},
                     {"failures", c.failures},
                     {"saturations", c.saturations},
                     {"seed", c.seed},
                     {"delta", c.delta},
                     {"alpha", c.alpha},
                     {"estimates", c.estimates}});
  }
  return {{"version", kVersion},
          {"plan", to_json(report.plan)},
          {"k_true", report.k_true},
          {"cells", cells}};
}

MonteCarloReport report_from_json(const json& j) {
  MonteCarloReport report;
  try {
    report.plan = plan_from_json(j.at("plan"));
    report.k_true = j.at("k_true").get<std::size_t>();
    for (const auto& c : j.at("cells")) {
      CellResult cell;
      cell.n = c.at("n").get<std::size_t>();
      cell.p = c.at("p").get<std::size_t>();
      cell.estimator = c.at("estimator").get<std::string>();
      cell.spec = estimator_from_json(c.at("spec"));
      cell.summary = {number_or_nan(c.at("rmse")), number_or_nan(c.at("accuracy")),
                      number_or_nan(c.at("mean_k_hat"))};
      cell.replications = c.at("reps").get<std::size_t>();
      cell.failures = c.at("failures").get<std::size_t>();
      cell.saturations = c.at("saturations").get<std::size_t>();
      cell.seed = c.at("seed").get<std::uint64_t>();
      cell.delta = number_or_nan(c.at("delta"));
      cell.alpha = number_or_nan(c.at("alpha"));
      cell.estimates = c.at("estimates").get<std::vector<std::size_t>>();
      report.cells.push_back(std::move(cell));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: ") + e.what());
  }
  return report;
}

json to_json(const CalibrationResult& r) {
  json trace = json::array();
  for (const auto& [delta, s] : r.trace) trace.push_back({delta, s});
  return {{"p", r.p},
          {"n", r.n},
          {"delta_n", r.delta_n},
          {"srmse", r.srmse_at_delta},
          {"replications", r.replications},
          {"grid_step", r.grid_step},
          {"target", r.target},
          {"seed", r.seed},
          {"trace", trace}};
}

std::string header_comment(const json& config, std::uint64_t base_seed) {
  return std::string("# spikecount ") + kVersion + "\n# config: " + config.dump() +
         "\n# base_seed: " + std::to_string(base_seed) + "\n";
}

void write_report_csv(std::ostream& out, const MonteCarloReport& report) {
  out << "n,p,estimator,rmse,accuracy,mean_k_hat,reps,seed,failures,delta\n";
  for (const auto& c : report.cells) {
    out << c.n << ',' << c.p << ',' << c.estimator << ',' << format_number(c.summary.rmse) << ','
        << format_number(c.summary.accuracy) << ',' << format_number(c.summary.mean_k_hat) << ','
        << c.replications << ',' << c.seed << ',' << c.failures << ',' << format_number(c.delta)
        << '\n';
  }
}

}  // namespace spikecount
