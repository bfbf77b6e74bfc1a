#include "spikecount/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spikecount/rmt.hpp"

namespace spikecount {

double PowerSchedule::operator()(std::size_t n) const {
  return scale * std::pow(static_cast<double>(n), -exponent);
}

EstimatorSpec EstimatorSpec::aic_star(double delta) {
  EstimatorSpec s;
  s.kind = EstimatorKind::AicStar;
  s.delta = delta;
  return s;
}

EstimatorSpec EstimatorSpec::aic_star_calibrated() {
  EstimatorSpec s;
  s.kind = EstimatorKind::AicStar;
  s.calibrated = true;
  return s;
}

EstimatorSpec EstimatorSpec::aic_double_star(double gamma) {
  EstimatorSpec s;
  s.kind = EstimatorKind::AicDoubleStar;
  s.delta_schedule.scale = gamma;
  return s;
}

EstimatorSpec EstimatorSpec::passemier_yao(double beta) {
  EstimatorSpec s;
  s.kind = EstimatorKind::PassemierYao;
  s.dn_schedule.scale = beta;
  return s;
}

std::string EstimatorSpec::label() const {
  switch (kind) {
    case EstimatorKind::Aic:
      return "AIC";
    case EstimatorKind::AicStar: {
      if (calibrated) return "AIC*";
      std::ostringstream os;
      os << "AIC*(delta=" << delta << ")";
      return os.str();
    }
    case EstimatorKind::AicDoubleStar:
      return "AIC**";
    case EstimatorKind::PassemierYao:
      return "PY";
  }
  return "?";
}

void EstimatorSpec::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("estimator delta must be >= 0");
  if (!(delta_schedule.scale > 0.0)) throw ConfigError("delta_n schedule scale must be positive");
  if (!(dn_schedule.scale > 0.0)) throw ConfigError("d_n schedule scale must be positive");
  if (calibrated && kind != EstimatorKind::AicStar)
    throw ConfigError("only AIC* takes a calibrated delta");
}

EstimatorSpec parse_estimator(const std::string& name) {
  std::string s;
  for (char ch : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (s == "aic" || s == "qaic") return EstimatorSpec::aic();
  if (s == "aic*" || s == "aic_star" || s == "qaic*") return EstimatorSpec::aic_star_calibrated();
  if (s == "aic0" || s == "delta0") return EstimatorSpec::zero_gap();
  if (s == "aic**" || s == "aic_double_star" || s == "qaic**") return EstimatorSpec::aic_double_star();
  if (s == "py" || s == "passemier-yao") return EstimatorSpec::passemier_yao();
  throw ConfigError("unknown estimator '" + name + "' (expected aic, aic*, aic**, aic0, py)");
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Aic:
      return "aic";
    case EstimatorKind::AicStar:
      return "aic*";
    case EstimatorKind::AicDoubleStar:
      return "aic**";
    case EstimatorKind::PassemierYao:
      return "py";
  }
  return "?";
}

std::size_t default_candidates(std::size_t n, std::size_t p) {
  const std::size_t limit = p <= n ? (p >= 2 ? p - 2 : 0) : (n >= 3 ? n - 3 : 0);
  return std::max<std::size_t>(1, std::min<std::size_t>(30, limit));
}

CriterionTerms criterion_terms(const EigenSpectrum& spectrum, std::size_t n, std::size_t p,
                               std::size_t candidates) {
  if (spectrum.p() != p) throw DataError("criterion: spectrum length differs from p");
  if (n < 2 || p < 2) throw DataError("criterion: needs n >= 2 and p >= 2");
  const Regime regime = regime_for(p, n);
  const std::size_t m = regime == Regime::SmallC ? p : n - 1;
  const double denom = static_cast<double>(regime == Regime::SmallC ? n : p);
  const std::size_t max_q = m;
  if (candidates < 1 || candidates > max_q) {
    std::ostringstream os;
    os << "candidate count " << candidates << " outside [1, " << max_q << "]";
    throw ConfigError(os.str());
  }

  // Backward cumulative sums of l_i and log l_i over the averaged block.
  Eigen::VectorXd tail_sum(m), tail_log(m);
  double sum = 0.0, log_sum = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    const double l = spectrum[i];
    if (!(l > 0.0)) {
      std::ostringstream os;
      os << "eigenvalue l_" << (i + 1) << " = " << l
         << " is not positive; the spectrum is rank deficient for the "
         << (regime == Regime::SmallC ? "p <= n" : "p > n") << " criterion";
      throw DataError(os.str());
    }
    sum += l;
    log_sum += std::log(l);
    tail_sum(static_cast<Eigen::Index>(i)) = sum;
    tail_log(static_cast<Eigen::Index>(i)) = log_sum;
  }

  CriterionTerms t;
  t.regime = regime;
  t.fit.resize(static_cast<Eigen::Index>(candidates));
  t.weight.resize(static_cast<Eigen::Index>(candidates));
  for (std::size_t j = 0; j < candidates; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double block = static_cast<double>(m - j);
    t.fit(jj) = block * std::log(tail_sum(jj) / block) - tail_log(jj);
    t.weight(jj) = (block - 1.0) * (block + 2.0) / (2.0 * denom);
  }
  return t;
}

CriterionProfile criterion_profile(const EigenSpectrum& spectrum, std::size_t n, std::size_t p,
                                   double alpha, std::size_t candidates) {
  if (!(alpha > 0.0)) throw DomainError("criterion: alpha must be positive");
  const CriterionTerms t = criterion_terms(spectrum, n, p, candidates);
  return {t.values(alpha), alpha, t.regime};
}

double aic_parameter_count(std::size_t p, std::size_t j) {
  const double jd = static_cast<double>(j);
  return (jd + 1.0) * (static_cast<double>(p) + 1.0 - jd / 2.0);
}

double aic_constant(std::size_t p, std::size_t n) {
  const double nd = static_cast<double>(n), pd = static_cast<double>(p);
  return nd * pd * std::log((nd - 1.0) / nd) + nd * pd * (1.0 + std::log(2.0 * std::numbers::pi));
}

double full_aic_value(const EigenSpectrum& spectrum, std::size_t n, std::size_t p, std::size_t j) {
  if (spectrum.p() != p) throw DataError("full_aic_value: spectrum length differs from p");
  if (p > n) throw DataError("full_aic_value: defined for p <= n only");
  if (j >= p) throw ConfigError("full_aic_value: j must be below p");
  double head_log = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const double l = spectrum[i];
    if (!(l > 0.0)) throw DataError("full_aic_value: nonpositive eigenvalue");
    if (i < j) head_log += std::log(l);
    else tail += l;
  }
  const double nd = static_cast<double>(n);
  const double block = static_cast<double>(p - j);
  return nd * head_log + nd * block * std::log(tail / block) + 2.0 * aic_parameter_count(p, j) +
         aic_constant(p, n);
}

SelectionResult select_k(const CriterionProfile& profile) {
  if (profile.values.size() == 0) throw ConfigError("select_k: empty profile");
  SelectionResult r;
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < profile.values.size(); ++j)
    if (profile.values(j) < profile.values(best)) best = j;
  r.k_hat = static_cast<std::size_t>(best);
  r.profile = profile;
  return r;
}

double resolve_alpha(const EstimatorSpec& spec, std::size_t n, std::size_t p) {
  const Ratio ratio = Ratio::from_shape(p, n);
  switch (spec.kind) {
    case EstimatorKind::Aic:
      return 2.0;
    case EstimatorKind::AicStar:
      if (spec.calibrated)
        throw ConfigError("AIC* with calibrated delta must be resolved before estimation");
      return penalty_alpha(ratio, spec.delta);
    case EstimatorKind::AicDoubleStar:
      return penalty_alpha(ratio, spec.delta_schedule(n));
    case EstimatorKind::PassemierYao:
      break;
  }
  throw ConfigError("resolve_alpha: the gap estimator has no penalty level");
}

SelectionResult py_estimate(const EigenSpectrum& spectrum, std::size_t s, double d_n) {
  if (s < 1) throw ConfigError("gap estimator: s must be at least 1");
  if (s + 2 > spectrum.p()) throw ConfigError("gap estimator: s + 2 exceeds the spectrum length");
  if (!(d_n > 0.0)) throw ConfigError("gap estimator: d_n must be positive");
  SelectionResult r;
  r.spec = EstimatorSpec::passemier_yao();
  r.spec.candidates = s;
  r.threshold = d_n;
  // 1-based gap l_{j+1} - l_{j+2} is spectrum[j] - spectrum[j+1] in 0-based storage.
  for (std::size_t j = 1; j <= s; ++j) {
    if (spectrum[j] - spectrum[j + 1] < d_n) {
      r.k_hat = j;
      return r;
    }
  }
  r.k_hat = s;
  r.saturated = true;
  return r;
}

SelectionResult estimate_spikes(const EigenSpectrum& spectrum, std::size_t n, std::size_t p,
                                const EstimatorSpec& spec) {
  spec.validate();
  if (spectrum.n != 0 && spectrum.n != n) throw DataError("spectrum was built from another n");
  EigenSpectrum local = spectrum;
  local.n = n;

  if (spec.kind == EstimatorKind::PassemierYao) {
    const EigenSpectrum scaled = with_divisor(local, Divisor::N);
    std::size_t s = spec.candidates;
    if (s == 0) s = std::min(default_candidates(n, p), p >= 3 ? p - 2 : std::size_t{1});
    SelectionResult r = py_estimate(scaled, s, spec.dn_schedule(n));
    r.spec = spec;
    return r;
  }

  const EigenSpectrum scaled = with_divisor(local, Divisor::NMinus1);
  const std::size_t q = spec.candidates ? spec.candidates : default_candidates(n, p);
  SelectionResult r = select_k(criterion_profile(scaled, n, p, resolve_alpha(spec, n, p), q));
  r.spec = spec;
  return r;
}

SelectionResult estimate_spikes(const Eigen::Ref<const Eigen::MatrixXd>& y,
                                const EstimatorSpec& spec, bool center) {
  const Divisor d = spec.kind == EstimatorKind::PassemierYao ? Divisor::N : Divisor::NMinus1;
  const EigenSpectrum spectrum = sample_spectrum(y, d, center);
  return estimate_spikes(spectrum, static_cast<std::size_t>(y.rows()),
                         static_cast<std::size_t>(y.cols()), spec);
}

Schedules default_schedules(std::size_t n, double gamma, double beta) {
  if (n < 2) throw DomainError("default_schedules: n must be at least 2");
  return {PowerSchedule{gamma, 0.25}(n), PowerSchedule{beta, 0.625}(n)};
}

}  // namespace spikecount
