// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance <path-to-spikecount-cli> [criterion numbers...]
// Exits nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spikecount/spikecount.hpp"
#include "spikecount/symmetric_eigen.hpp"

using namespace spikecount;

namespace {

constexpr std::uint64_t kBaseSeed = 20201;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> small_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 20; ++i) g.push_back(0.05 * i);
  return g;
}

std::vector<double> large_grid() {
  std::vector<double> g;
  for (int i = 11; i <= 100; ++i) g.push_back(0.1 * i);
  return g;
}

// 1. Analytic suite.
void analytic_suite(Outcome& o) {
  const auto start = Clock::now();
  std::size_t checks = 0;
  double worst_roundtrip = 0.0;

  for (double x = 0.01; x < 1.0; x += 0.01) {
    o.require(deviance(x) > deviance(x + 0.01) || x + 0.01 > 1.0, "h decreasing below 1");
    ++checks;
  }
  for (double x = 1.0; x < 50.0; x += 0.05) {
    o.require(deviance(x + 0.05) > deviance(x), "h increasing above 1");
    ++checks;
  }
  for (double c : {0.05, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    const Ratio r(c);
    for (double x = 1.01; x + 0.01 < r.bbp(); x += 0.01) {
      o.require(spike_forward(r, x + 0.01) < spike_forward(r, x), "psi decreasing below bbp");
      ++checks;
    }
    for (double x = r.bbp(); x < 40.0; x += 0.05) {
      o.require(spike_forward(r, x + 0.05) > spike_forward(r, x), "psi increasing above bbp");
      if (r.large()) {
        o.require(spike_gain_large(r, x + 0.05) > spike_gain_large(r, x), "Q increasing");
      } else {
        o.require(spike_gain_small(r, x + 0.05) > spike_gain_small(r, x), "F increasing");
      }
      checks += 2;
    }
    auto gain = [&](double x) { return r.large() ? spike_gain_large(r, x) : spike_gain_small(r, x); };
    for (double x = r.bbp() + 0.01; x < 30.0; x += 0.13) {
      worst_roundtrip = std::max(worst_roundtrip, std::abs(invert_on_spike_branch(r, gain, gain(x)) - x));
      ++checks;
    }
  }
  o.require(worst_roundtrip <= 1e-9, "round trip <= 1e-9");
  for (double c : small_grid()) {
    const Ratio r(c);
    o.require(2 * c - spike_gain_small(r, r.bbp()) > 0, "2c - F_c(1+sqrt c) > 0");
  }
  for (double c : large_grid()) {
    const Ratio r(c);
    o.require(2 - spike_gain_large(r, r.bbp()) > 0, "2 - Q_c(1+sqrt c) > 0");
  }
  const double t = seconds_since(start);
  o.require(t < 1.0, "runtime < 1 s");
  o.detail << checks << " grid checks, worst round trip " << worst_roundtrip << ", " << t << " s";
}

// 2. Threshold gaps.
void threshold_gaps(Outcome& o) {
  const auto start = Clock::now();
  double margin_small = INFINITY, margin_large = INFINITY;
  for (double c : small_grid()) margin_small = std::min(margin_small, thresholds(Ratio(c)).gap - std::pow(c, 0.9));
  for (double c : large_grid()) margin_large = std::min(margin_large, thresholds(Ratio(c)).gap - std::pow(c, 0.1));
  o.require(margin_small > 0, "u(c) > c^0.9");
  o.require(margin_large > 0, "v(c) > c^0.1");
  const double t = seconds_since(start);
  o.require(t < 1.0, "runtime < 1 s");
  o.detail << "min u(c)-c^0.9 = " << margin_small << ", min v(c)-c^0.1 = " << margin_large << ", "
           << t << " s";
}

Eigen::MatrixXd gaussian(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = z(gen);
  return m;
}

// 3. Eigensolver against conjugated diagonals with known spectra.
void eigensolver(Outcome& o) {
  const auto start = Clock::now();
  std::mt19937_64 gen(kBaseSeed);
  std::uniform_int_distribution<int> dim(1, 50);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int p = dim(gen);
    Eigen::VectorXd d(p);
    for (int i = 0; i < p; ++i) d(i) = val(gen);
    if (t % 5 == 0 && p > 3) d.head(3).setConstant(d(0));  // repeated eigenvalues
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(gen, p, p));
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd s = q * d.asDiagonal() * q.transpose();
    s = (s + s.transpose()) / 2;
    std::sort(d.begin(), d.end());
    const double err = (linalg::symmetric_eigenvalues(s) - d).cwiseAbs().maxCoeff() / (1 + s.norm());
    worst = std::max(worst, err);
  }
  o.require(worst <= 1e-9, "max error <= 1e-9 (1 + ||S||_F)");

  double worst_gram = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 5 + t, p = 10 + 3 * t;
    const Eigen::MatrixXd y = gaussian(gen, n, p);
    const EigenSpectrum a = spectrum_via_gram(y, Divisor::NMinus1);
    const EigenSpectrum b = eigenvalues_descending(sample_covariance(y, Divisor::NMinus1));
    worst_gram = std::max(worst_gram, (a.values - b.values).cwiseAbs().maxCoeff());
  }
  o.require(worst_gram <= 1e-8, "Gram route within 1e-8");
  const double t = seconds_since(start);
  o.require(t < 10.0, "runtime < 10 s");
  o.detail << "worst scaled error " << worst << ", worst Gram gap " << worst_gram << ", " << t << " s";
}

double naive_criterion(const Eigen::VectorXd& l, std::size_t n, std::size_t p, std::size_t j) {
  const bool wide = p > n;
  const std::size_t m = wide ? n - 1 : p;
  double sum = 0.0, logs = 0.0;
  for (std::size_t i = j; i < m; ++i) {
    sum += l(static_cast<Eigen::Index>(i));
    logs += std::log(l(static_cast<Eigen::Index>(i)));
  }
  const double block = static_cast<double>(m - j), jj = static_cast<double>(j);
  const double nd = static_cast<double>(n), pd = static_cast<double>(p);
  const double pen = wide ? (nd - jj - 2) * (nd - jj + 1) / (2 * pd) : (pd - jj - 1) * (pd - jj + 2) / (2 * nd);
  return block * std::log(sum / block) - logs - 2.0 * pen;
}

// 4. Criterion against a naive evaluation; AIC and A_j share the argmin.
void criterion(Outcome& o) {
  std::mt19937_64 gen(kBaseSeed + 4);
  double worst = 0.0;
  int argmin_mismatch = 0;
  for (int regime = 0; regime < 2; ++regime) {
    for (int t = 0; t < 50; ++t) {
      const std::size_t a = 5 + gen() % 60, b = a + 1 + gen() % 60;
      const std::size_t p = regime == 0 ? a : b, n = regime == 0 ? b : a;
      const Eigen::MatrixXd y = gaussian(gen, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
      Eigen::MatrixXd scaled = y;
      scaled.col(0) *= 3.0;
      const EigenSpectrum s = sample_spectrum(scaled, Divisor::NMinus1);
      const std::size_t q = regime == 0 ? p : n - 1;
      const auto prof = criterion_profile(s, n, p, 2.0, q);
      for (std::size_t j = 0; j < q; ++j)
        worst = std::max(worst, std::abs(prof.values(static_cast<Eigen::Index>(j)) - naive_criterion(s.values, n, p, j)));
      if (regime == 0) {
        std::size_t best = 0;
        double best_v = INFINITY;
        for (std::size_t j = 0; j < p; ++j) {
          const double v = full_aic_value(s, n, p, j);
          if (v < best_v) {
            best_v = v;
            best = j;
          }
        }
        if (best != select_k(prof).k_hat) ++argmin_mismatch;
      }
    }
  }
  o.require(worst <= 1e-10, "profile within 1e-10 of naive");
  o.require(argmin_mismatch == 0, "argmin AIC_j == argmin A_j");
  o.detail << "worst difference " << worst << ", argmin mismatches " << argmin_mismatch;
}

// 5. Top sample eigenvalues for c = 0.5, one spike at 3.
void spike_limits(Outcome& o) {
  const auto start = Clock::now();
  const std::size_t n = 1000, p = 500;
  double l1 = 0.0, l2 = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Xoshiro256ss rng(derive_seed(kBaseSeed, {5, s}));
    const EigenSpectrum spec = sample_spectrum(sample_spiked_gaussian({p, {3.0}, false}, n, rng), Divisor::NMinus1);
    l1 += spec[0] / 20;
    l2 += spec[1] / 20;
  }
  const double edge = (1 + std::sqrt(0.5)) * (1 + std::sqrt(0.5));
  o.require(std::abs(l1 - 3.75) < 0.1, "|mean l1 - 3.75| < 0.1");
  o.require(std::abs(l2 - edge) < 0.1, "|mean l2 - 2.9142| < 0.1");
  const double t = seconds_since(start);
  o.require(t < 120.0, "runtime < 2 min");
  o.detail << "mean l1 " << l1 << ", mean l2 " << l2 << " (edge " << edge << "), " << t << " s";
}

// 6. Zero-gap estimator at reduced scale.
void zero_gap_table(Outcome& o) {
  const auto start = Clock::now();
  ExperimentPlan plan = preset_plan("table-2");
  plan.base_seed = kBaseSeed;
  plan.n_grid = {100, 200, 400, 800, 1200, 2000};
  const MonteCarloReport report = run_monte_carlo(plan);
  const double slack = 2 * std::sqrt(0.25 / static_cast<double>(plan.replications));
  double running_max = 0.0;
  for (const auto& c : report.cells) {
    o.detail << "n=" << c.n << ": acc " << c.summary.accuracy << ", mean " << c.summary.mean_k_hat << "; ";
    o.require(c.failures == 0, "no failed replications");
    o.require(c.summary.accuracy >= running_max - slack, "accuracy nondecreasing in n up to noise");
    running_max = std::max(running_max, c.summary.accuracy);
    if (c.n == 100) o.require(c.summary.mean_k_hat >= 4.0 && c.summary.mean_k_hat <= 7.0, "n=100 mean in [4, 7]");
    if (c.n == 2000) {
      o.require(c.summary.accuracy >= 0.80, "n=2000 accuracy >= 0.80");
      o.require(c.summary.mean_k_hat >= 9.5 && c.summary.mean_k_hat <= 10.6, "n=2000 mean in [9.5, 10.6]");
    }
  }
  o.detail << seconds_since(start) << " s";
}

// 7. Calibrated gaps at two table entries.
void calibration_table(Outcome& o) {
  const auto start = Clock::now();
  CalibrationSettings s;
  s.replications = 200;
  struct Entry {
    std::size_t p, n;
    double lo, hi;
  };
  for (const Entry e : {Entry{200, 200, 0.42, 0.62}, Entry{200, 400, 0.20, 0.36}}) {
    const auto r = calibrate_delta(e.p, e.n, s, derive_seed(kBaseSeed, {kCalibrationStream, e.p, e.n}));
    o.detail << "(" << e.p << "," << e.n << ") delta_n " << r.delta_n << "; ";
    o.require(r.delta_n >= e.lo - 1e-9 && r.delta_n <= e.hi + 1e-9,
              "(" + std::to_string(e.p) + "," + std::to_string(e.n) + ") in range");
  }
  o.detail << seconds_since(start) << " s";
}

// 8. Paired orderings on models B and C.
void comparisons(Outcome& o) {
  const auto start = Clock::now();
  for (const char* name : {"model-b", "model-c"}) {
    ExperimentPlan plan = preset_plan(name);
    plan.base_seed = kBaseSeed;
    plan.replications = 100;
    plan.n_grid = {400, 600};
    const MonteCarloReport report = run_monte_carlo(plan);
    for (std::size_t n : plan.n_grid) {
      double star = NAN, aic = NAN, py = NAN;
      for (const auto& c : report.cells) {
        if (c.n != n) continue;
        if (c.estimator == "AIC*") star = c.summary.rmse;
        if (c.estimator == "AIC") aic = c.summary.rmse;
        if (c.estimator == "PY") py = c.summary.rmse;
      }
      o.detail << name << " n=" << n << ": AIC* " << star << ", AIC " << aic << ", PY " << py << "; ";
      if (std::string(name) == "model-b") o.require(star < aic, "model B: AIC* < AIC");
      else o.require(star <= py, "model C: AIC* <= PY");
    }
  }
  o.detail << seconds_since(start) << " s";
}

// 9. Fresh null run at the calibrated gap.
void null_budget(Outcome& o) {
  const std::size_t p = 400, n = 400;
  const auto cal = calibrate_delta(p, n, CalibrationSettings{}, derive_seed(kBaseSeed, {kCalibrationStream, p, n}));
  ExperimentPlan plan;
  plan.name = "null-check";
  plan.spikes = {};
  plan.c_target = 1.0;
  plan.n_grid = {n};
  plan.replications = 500;
  plan.estimators = {EstimatorSpec::aic_star(cal.delta_n)};
  plan.base_seed = derive_seed(kBaseSeed, {9});
  const auto report = run_monte_carlo(plan);
  const double srmse = report.cells.at(0).summary.rmse;
  o.require(srmse <= 0.02, "fresh mean(k_hat^2) <= 0.02");
  o.detail << "delta_n " << cal.delta_n << " (calibration SRMSE " << cal.srmse_at_delta
           << "), fresh mean(k_hat^2) " << srmse;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 10. Byte-identical reruns of simulate and calibrate.
void determinism(Outcome& o, const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spikecount_acceptance";
  fs::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "simulate --preset model-a --reps 20 --n-grid 100,200 --cal-reps 100"},
      {"simulate-json", "simulate --preset table-2 --reps 10 --n-grid 100,200 --format json"},
      {"calibrate", "calibrate --p 100 --n 100 --reps 100"},
      {"tables", "tables --which 1 --pairs 60x60,60x120 --reps 50"},
  };
  for (const auto& [tag, args] : commands) {
    std::string first;
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / (tag + "_" + std::to_string(run) + ".out");
      const std::string threads = run == 0 ? " --threads 1" : " --threads 4";
      const std::string cmd = cli + " " + args + threads + " --seed 4242 --out " + out.string() + " 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      o.require(rc == 0, tag + " exit status");
      const std::string text = slurp(out);
      o.require(!text.empty(), tag + " produced output");
      if (run == 0) first = text;
      else o.require(text == first, tag + " byte-identical");
    }
    o.detail << tag << " ok; ";
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <spikecount-cli> [criterion...]\n";
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> selected;
  for (int i = 2; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"analytic suite", analytic_suite},
      {"threshold gaps", threshold_gaps},
      {"eigensolver oracle", eigensolver},
      {"criterion oracle", criterion},
      {"spike eigenvalue limits", spike_limits},
      {"zero-gap table", zero_gap_table},
      {"delta_n calibration", calibration_table},
      {"comparison orderings", comparisons},
      {"null false-positive budget", null_budget},
      {"determinism", [&](Outcome& o) { determinism(o, cli); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << ". " << criteria[i].first << ": " << o.detail.str()
              << std::endl;
  }
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criterion(s) failed"
                         : std::string("acceptance: all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
