// spikecount: estimate the number of spikes in a covariance spectrum and run
// the threshold, calibration and Monte-Carlo experiments.
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spikecount/spikecount.hpp"

namespace {

using nlohmann::json;
using namespace spikecount;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

struct GlobalOptions {
  std::uint64_t seed = 20201;
  std::string out = "-";
  std::string format = "csv";
  std::size_t threads = 0;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<std::size_t> parse_size_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError("not an integer: '" + item + "'");
    }
    if (pos != item.size() || v < 1) throw ConfigError("not a positive integer: '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_pairs(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw ConfigError("pair must look like PxN: '" + item + "'");
    const auto p = parse_size_list(item.substr(0, x));
    const auto n = parse_size_list(item.substr(x + 1));
    if (p.size() != 1 || n.size() != 1) throw ConfigError("pair must look like PxN: '" + item + "'");
    out.emplace_back(p[0], n[0]);
  }
  return out;
}

void check_format(const GlobalOptions& g) {
  if (g.format != "csv" && g.format != "json")
    throw ConfigError("--format must be csv or json (got '" + g.format + "')");
}

// -- rmt ----------------------------------------------------------------------

struct RmtArgs {
  double c = 0.0;
  std::optional<double> x;
  std::optional<double> delta;
};

int run_rmt(const GlobalOptions& g, const RmtArgs& a) {
  check_format(g);
  if (!(a.c > 0.0)) throw DomainError("c must be positive (got " + format_number(a.c) + ")");
  const Ratio ratio(a.c);
  const MpLaw law(ratio);
  const auto t = thresholds(ratio);
  std::vector<std::pair<std::string, double>> rows = {
      {"c", t.c},
      {"bbp", t.bbp},
      {"b", t.edge},
      {"a", law.lower},
      {"mass_at_zero", law.mass_at_zero},
      {"lambda_c", t.lambda_c},
      {ratio.large() ? "v" : "u", t.gap},
      {"gain_at_bbp", ratio.large() ? spike_gain_large(ratio, t.bbp) : spike_gain_small(ratio, t.bbp)},
  };
  if (a.x) {
    rows.emplace_back(ratio.large() ? "Q_c(x)" : "F_c(x)",
                      ratio.large() ? spike_gain_large(ratio, *a.x) : spike_gain_small(ratio, *a.x));
    rows.emplace_back("psi_c(x)", spike_forward(ratio, *a.x));
  }
  if (a.delta) rows.emplace_back("alpha", penalty_alpha(ratio, *a.delta));

  Output out(g.out);
  if (g.format == "json") {
    json j = json::object();
    for (const auto& [k, v] : rows) j[k] = v;
    if (a.x) j["x"] = *a.x;
    if (a.delta) j["delta"] = *a.delta;
    out.stream() << j.dump(2) << '\n';
  } else {
    out.stream() << "quantity,value\n";
    for (const auto& [k, v] : rows) out.stream() << k << ',' << format_number(v) << '\n';
  }
  return kOk;
}

// -- estimate -----------------------------------------------------------------

struct EstimateArgs {
  std::string data;
  std::string estimator = "aic*";
  std::optional<double> delta;
  std::optional<double> gamma;
  std::optional<double> beta;
  std::size_t candidates = 0;
  bool center = false;
  std::size_t calibration_reps = 500;
  std::size_t top = 10;
};

int run_estimate(const GlobalOptions& g, const EstimateArgs& a) {
  check_format(g);
  EstimatorSpec spec = parse_estimator(a.estimator);
  if (a.delta) {
    if (spec.kind != EstimatorKind::AicStar) throw ConfigError("--delta applies to aic* only");
    spec.delta = *a.delta;
    spec.calibrated = false;
  }
  if (a.gamma) spec.delta_schedule.scale = *a.gamma;
  if (a.beta) spec.dn_schedule.scale = *a.beta;
  spec.candidates = a.candidates;
  spec.validate();

  const Eigen::MatrixXd y = load_csv_matrix(a.data);
  validate_data_matrix(y);
  const auto n = static_cast<std::size_t>(y.rows());
  const auto p = static_cast<std::size_t>(y.cols());

  std::optional<CalibrationResult> cal;
  EstimatorSpec resolved = spec;
  if (spec.calibrated) {
    CalibrationSettings settings;
    settings.replications = a.calibration_reps;
    settings.candidates = a.candidates;
    cal = calibrate_delta(p, n, settings, derive_seed(g.seed, {kCalibrationStream, p, n}), g.threads);
    resolved.delta = cal->delta_n;
    resolved.calibrated = false;
  }
  const Divisor divisor = spec.kind == EstimatorKind::PassemierYao ? Divisor::N : Divisor::NMinus1;
  const EigenSpectrum spectrum = sample_spectrum(y, divisor, a.center);
  const SelectionResult result = estimate_spikes(spectrum, n, p, resolved);

  json config = {{"command", "estimate"},
                 {"data", a.data},
                 {"estimator", to_json(spec)},
                 {"center", a.center},
                 {"calibration_reps", a.calibration_reps}};
  const std::size_t top = std::min<std::size_t>(a.top, p);

  Output out(g.out);
  std::ostream& os = out.stream();
  if (g.format == "json") {
    json j = {{"config", config},
              {"seed", g.seed},
              {"n", n},
              {"p", p},
              {"estimator", spec.label()},
              {"k_hat", result.k_hat},
              {"regime", p <= n ? "p<=n" : "p>n"}};
    std::vector<double> eig(spectrum.values.data(), spectrum.values.data() + top);
    j["top_eigenvalues"] = eig;
    if (spec.kind == EstimatorKind::PassemierYao) {
      j["d_n"] = result.threshold;
      j["saturated"] = result.saturated;
    } else {
      j["alpha"] = result.profile.alpha;
      std::vector<double> prof(result.profile.values.data(),
                               result.profile.values.data() + result.profile.values.size());
      j["profile"] = prof;
    }
    if (resolved.kind == EstimatorKind::AicStar) j["delta"] = resolved.delta;
    if (resolved.kind == EstimatorKind::AicDoubleStar) j["delta_n"] = resolved.delta_schedule(n);
    if (cal) j["calibration"] = to_json(*cal);
    os << j.dump(2) << '\n';
    return kOk;
  }
  os << header_comment(config, g.seed);
  os << "# estimator: " << spec.label() << (resolved.experimental() ? " (experimental)" : "") << '\n';
  os << "# n: " << n << ", p: " << p << ", regime: " << (p <= n ? "p<=n" : "p>n") << '\n';
  if (resolved.kind == EstimatorKind::AicStar) os << "# delta: " << format_number(resolved.delta) << '\n';
  if (resolved.kind == EstimatorKind::AicDoubleStar)
    os << "# delta_n: " << format_number(resolved.delta_schedule(n)) << '\n';
  if (spec.kind == EstimatorKind::PassemierYao) {
    os << "# d_n: " << format_number(result.threshold) << '\n';
    if (result.saturated) os << "# warning: no gap below d_n within 1..s; k_hat saturated at s\n";
  } else {
    os << "# alpha: " << format_number(result.profile.alpha) << '\n';
  }
  os << "# k_hat: " << result.k_hat << '\n';
  os << "# top eigenvalues:";
  for (std::size_t i = 0; i < top; ++i) os << ' ' << format_number(spectrum[i]);
  os << '\n';
  os << "j,criterion\n";
  for (Eigen::Index j = 0; j < result.profile.values.size(); ++j)
    os << j << ',' << format_number(result.profile.values(j)) << '\n';
  return kOk;
}

// -- simulate -----------------------------------------------------------------

struct SimulateArgs {
  std::string preset;
  std::string plan_path;
  std::size_t reps = 0;
  std::string n_grid;
  std::size_t calibration_reps = 0;
};

ExperimentPlan resolve_plan(const GlobalOptions& g, const SimulateArgs& a, bool seed_given) {
  ExperimentPlan plan;
  if (!a.plan_path.empty()) {
    std::ifstream in(a.plan_path);
    if (!in) throw ConfigError("cannot open plan '" + a.plan_path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("plan is not valid JSON: ") + e.what());
    }
    plan = plan_from_json(j);
    if (seed_given) plan.base_seed = g.seed;
  } else {
    plan = preset_plan(a.preset);
    plan.base_seed = g.seed;
  }
  if (a.reps) plan.replications = a.reps;
  if (!a.n_grid.empty()) plan.n_grid = parse_size_list(a.n_grid);
  if (a.calibration_reps) plan.calibration.replications = a.calibration_reps;
  plan.validate();
  return plan;
}

void emit_report(const GlobalOptions& g, const MonteCarloReport& report) {
  Output out(g.out);
  if (g.format == "json") {
    out.stream() << to_json(report).dump(2) << '\n';
    return;
  }
  out.stream() << header_comment(to_json(report.plan), report.plan.base_seed);
  write_report_csv(out.stream(), report);
}

int run_simulate(const GlobalOptions& g, const SimulateArgs& a, bool seed_given) {
  check_format(g);
  if (a.preset.empty() == a.plan_path.empty())
    throw ConfigError("give exactly one of --preset or --plan");
  const ExperimentPlan plan = resolve_plan(g, a, seed_given);
  emit_report(g, run_monte_carlo(plan, RunOptions{g.threads}));
  return kOk;
}

// -- calibrate ----------------------------------------------------------------

struct CalibrateArgs {
  std::size_t p = 0;
  std::size_t n = 0;
  CalibrationSettings settings;
};

void write_calibration_rows(std::ostream& os, const std::vector<CalibrationResult>& rows) {
  os << "p,n,delta_n,srmse,reps,grid_step,target,seed\n";
  for (const auto& r : rows)
    os << r.p << ',' << r.n << ',' << format_number(r.delta_n) << ','
       << format_number(r.srmse_at_delta) << ',' << r.replications << ','
       << format_number(r.grid_step) << ',' << format_number(r.target) << ',' << r.seed << '\n';
}

CalibrationResult calibrate_pair(const GlobalOptions& g, std::size_t p, std::size_t n,
                                 const CalibrationSettings& settings) {
  return calibrate_delta(p, n, settings, derive_seed(g.seed, {kCalibrationStream, p, n}), g.threads);
}

int run_calibrate(const GlobalOptions& g, const CalibrateArgs& a) {
  check_format(g);
  const CalibrationResult r = calibrate_pair(g, a.p, a.n, a.settings);
  std::cerr << "delta_n = " << format_number(r.delta_n) << " for (p, n) = (" << r.p << ", " << r.n
            << "): SRMSE " << format_number(r.srmse_at_delta) << " <= " << format_number(r.target)
            << " over " << r.replications << " null replications\n";
  const json config = {{"command", "calibrate"}, {"p", a.p}, {"n", a.n},
                       {"settings", to_json(a.settings)}};
  Output out(g.out);
  if (g.format == "json") {
    out.stream() << json{{"config", config}, {"base_seed", g.seed}, {"result", to_json(r)}}.dump(2)
                 << '\n';
    return kOk;
  }
  out.stream() << header_comment(config, g.seed);
  write_calibration_rows(out.stream(), {r});
  return kOk;
}

// -- tables -------------------------------------------------------------------

struct TablesArgs {
  int which = 0;
  std::string pairs;
  std::size_t reps = 0;
  std::string n_grid;
};

int run_tables(const GlobalOptions& g, const TablesArgs& a) {
  check_format(g);
  if (a.which == 1) {
    auto pairs = a.pairs.empty() ? calibration_table_pairs() : parse_pairs(a.pairs);
    CalibrationSettings settings;
    if (a.reps) settings.replications = a.reps;
    std::vector<CalibrationResult> rows;
    for (const auto& [p, n] : pairs) rows.push_back(calibrate_pair(g, p, n, settings));
    json cfg_pairs = json::array();
    for (const auto& [p, n] : pairs) cfg_pairs.push_back({p, n});
    const json config = {{"command", "tables"}, {"which", 1}, {"pairs", cfg_pairs},
                         {"settings", to_json(settings)}};
    Output out(g.out);
    if (g.format == "json") {
      json results = json::array();
      for (const auto& r : rows) results.push_back(to_json(r));
      out.stream() << json{{"config", config}, {"base_seed", g.seed}, {"rows", results}}.dump(2)
                   << '\n';
    } else {
      out.stream() << header_comment(config, g.seed);
      write_calibration_rows(out.stream(), rows);
    }
    return kOk;
  }
  if (a.which == 2) {
    ExperimentPlan plan = preset_plan("table-2");
    plan.base_seed = g.seed;
    if (a.reps) plan.replications = a.reps;
    if (!a.n_grid.empty()) plan.n_grid = parse_size_list(a.n_grid);
    plan.validate();
    const MonteCarloReport report = run_monte_carlo(plan, RunOptions{g.threads});
    Output out(g.out);
    if (g.format == "json") {
      out.stream() << to_json(report).dump(2) << '\n';
    } else {
      out.stream() << header_comment(to_json(plan), plan.base_seed);
      out.stream() << "n,accuracy,avg_k_hat\n";
      for (const auto& c : report.cells)
        out.stream() << c.n << ',' << format_number(c.summary.accuracy) << ','
                     << format_number(c.summary.mean_k_hat) << '\n';
    }
    return kOk;
  }
  throw ConfigError("unknown table " + std::to_string(a.which) + " (available: 1, 2)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spike-count estimation for high-dimensional covariance spectra"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Base seed for all random streams");
  app.add_option("--out", g.out, "Output file ('-' for stdout)");
  app.add_option("--format", g.format, "Output format: csv or json");
  app.add_option("--threads", g.threads, "Worker threads (0: SPIKECOUNT_THREADS or all cores)");

  RmtArgs rmt;
  auto* cmd_rmt = app.add_subcommand("rmt", "Thresholds, gaps and penalty levels for a ratio c");
  cmd_rmt->add_option("--c", rmt.c, "Aspect ratio p/n")->required();
  cmd_rmt->add_option("--x", rmt.x, "Evaluate the spike-gain function at x >= 1+sqrt(c)");
  cmd_rmt->add_option("--delta", rmt.delta, "Penalty level for gap delta >= 0");

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand("estimate", "Estimate the number of spikes of a data CSV");
  cmd_est->add_option("--data", est.data, "CSV file, rows are observations")->required();
  cmd_est->add_option("--estimator", est.estimator, "aic | aic* | aic** | aic0 | py");
  cmd_est->add_option("--delta", est.delta, "Fixed gap for aic* (default: calibrated)");
  cmd_est->add_option("--gamma", est.gamma, "Scale of delta_n = gamma n^-1/4 for aic**");
  cmd_est->add_option("--beta", est.beta, "Scale of d_n = beta n^-5/8 for py");
  cmd_est->add_option("--candidates", est.candidates, "Candidate models q (or py bound s)");
  cmd_est->add_flag("--center", est.center, "Subtract column means first");
  cmd_est->add_option("--cal-reps", est.calibration_reps, "Null replications for calibrating delta");
  cmd_est->add_option("--top", est.top, "Number of leading eigenvalues to print");

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Run a Monte-Carlo comparison plan");
  cmd_sim->add_option("--preset", sim.preset, "Named plan: " + [] {
    std::string s;
    for (const auto& n : preset_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }());
  cmd_sim->add_option("--plan", sim.plan_path, "JSON plan file");
  cmd_sim->add_option("--reps", sim.reps, "Override replications");
  cmd_sim->add_option("--n-grid", sim.n_grid, "Override n grid (comma separated)");
  cmd_sim->add_option("--cal-reps", sim.calibration_reps, "Override calibration replications");

  CalibrateArgs cal;
  auto* cmd_cal = app.add_subcommand("calibrate", "Calibrate delta_n on the null model");
  cmd_cal->add_option("--p", cal.p, "Dimension")->required();
  cmd_cal->add_option("--n", cal.n, "Sample size")->required();
  cmd_cal->add_option("--reps", cal.settings.replications, "Null replications");
  cmd_cal->add_option("--target", cal.settings.target, "Budget for mean(k_hat^2)");
  cmd_cal->add_option("--step", cal.settings.grid_step, "Delta grid step");
  cmd_cal->add_option("--max-delta", cal.settings.max_delta, "Largest delta searched");

  TablesArgs tab;
  auto* cmd_tab = app.add_subcommand("tables", "Reproduce the calibration (1) or zero-gap (2) table");
  cmd_tab->add_option("--which", tab.which, "Table number")->required();
  cmd_tab->add_option("--pairs", tab.pairs, "Calibration table pairs, e.g. 200x200,200x400");
  cmd_tab->add_option("--reps", tab.reps, "Override replications");
  cmd_tab->add_option("--n-grid", tab.n_grid, "Zero-gap table n grid override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*cmd_rmt) return run_rmt(g, rmt);
    if (*cmd_est) return run_estimate(g, est);
    if (*cmd_sim) return run_simulate(g, sim, seed_opt->count() > 0);
    if (*cmd_cal) return run_calibrate(g, cal);
    if (*cmd_tab) return run_tables(g, tab);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
