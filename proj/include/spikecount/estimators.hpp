#pragma once

// Spike-count selection rules. Every AIC-family rule shares one criterion
//   A_j = (m - j) log l̄_j - sum_{i>j}^{m} log l_i - alpha * w_j
// with m = p, w_j = (p-j-1)(p-j+2)/(2n) when p <= n, and m = n-1,
// w_j = (n-j-2)(n-j+1)/(2p) when p > n. The rules differ only in alpha:
// 2 (classical), penalty_alpha(p/n, delta) (fixed gap), penalty_alpha(p/n,
// delta_n) (vanishing gap). The gap estimator of Passemier and Yao looks
// at consecutive eigenvalue differences instead.

#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "spikecount/spectra.hpp"

namespace spikecount {

enum class EstimatorKind { Aic, AicStar, AicDoubleStar, PassemierYao };

/// scale * n^(-exponent)
struct PowerSchedule {
  double scale = 1.0;
  double exponent = 0.25;

  double operator()(std::size_t n) const;
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Aic;
  /// Fixed gap for AicStar. Zero gives the experimental zero-gap estimator.
  double delta = 0.0;
  /// AicStar only: delta is to be resolved by null-model calibration at the
  /// data shape before estimation (see calibration.hpp).
  bool calibrated = false;
  PowerSchedule delta_schedule{1.0, 0.25};
  PowerSchedule dn_schedule{1.0, 0.625};
  /// Number of candidate models q (or PY bound s); 0 selects the default.
  std::size_t candidates = 0;

  static EstimatorSpec aic() { return {}; }
  static EstimatorSpec aic_star(double delta);
  static EstimatorSpec aic_star_calibrated();
  static EstimatorSpec aic_double_star(double gamma = 1.0);
  static EstimatorSpec zero_gap() { return aic_star(0.0); }
  static EstimatorSpec passemier_yao(double beta = 1.0);

  /// Short stable name used in reports: AIC, AIC*, AIC*(delta=0.3), AIC**, PY, AIC*(delta=0).
  std::string label() const;
  bool experimental() const { return kind == EstimatorKind::AicStar && !calibrated && delta == 0.0; }
  /// Throws ConfigError on negative gaps or nonpositive schedule scales.
  void validate() const;
};

/// Parses aic | aic* | aic** | aic0 | py (case-insensitive; "qaic" spellings
/// accepted). aic* comes back calibrated, aic0 is the zero-gap rule.
EstimatorSpec parse_estimator(const std::string& name);
std::string to_string(EstimatorKind kind);

/// Data-dependent part and penalty weights of the criterion; the profile for
/// any alpha is fit - alpha * weight.
struct CriterionTerms {
  Eigen::VectorXd fit;
  Eigen::VectorXd weight;
  Regime regime = Regime::SmallC;

  Eigen::VectorXd values(double alpha) const { return fit - alpha * weight; }
};

struct CriterionProfile {
  Eigen::VectorXd values;  ///< A_j (or Ã_j) for j = 0..candidates-1
  double alpha = 2.0;
  Regime regime = Regime::SmallC;
};

struct SelectionResult {
  std::size_t k_hat = 0;
  CriterionProfile profile;  ///< empty values for the gap estimator
  EstimatorSpec spec;
  bool saturated = false;  ///< gap estimator found no small gap within 1..s
  double threshold = 0.0;  ///< d_n used by the gap estimator
};

/// Default q: min(30, p-2) for p <= n, min(30, n-3) for p > n; at least 1.
std::size_t default_candidates(std::size_t n, std::size_t p);

/// Throws DataError if a logged eigenvalue is nonpositive and ConfigError if
/// `candidates` is outside [1, p] (p <= n) or [1, n-1] (p > n).
CriterionTerms criterion_terms(const EigenSpectrum& spectrum, std::size_t n, std::size_t p,
                               std::size_t candidates);

CriterionProfile criterion_profile(const EigenSpectrum& spectrum, std::size_t n, std::size_t p,
                                   double alpha, std::size_t candidates);

/// Absolute AIC_j = n log(l_1...l_j) + n(p-j) log l̄_j + 2 d_j + C_{p,n} (p <= n).
double full_aic_value(const EigenSpectrum& spectrum, std::size_t n, std::size_t p, std::size_t j);
/// d_j = (j+1)(p+1-j/2)
double aic_parameter_count(std::size_t p, std::size_t j);
/// C_{p,n} = n p log((n-1)/n) + n p (1 + log 2 pi)
double aic_constant(std::size_t p, std::size_t n);

/// Smallest index attaining the minimum.
SelectionResult select_k(const CriterionProfile& profile);

/// Penalty level alpha the spec uses at this shape (AIC family only).
double resolve_alpha(const EstimatorSpec& spec, std::size_t n, std::size_t p);

/// Runs the estimator on a spectrum of the sample covariance of an n x p
/// sample. AIC-family rules expect divisor n-1 and the gap rule divisor n;
/// the spectrum is rescaled when it carries the other divisor.
SelectionResult estimate_spikes(const EigenSpectrum& spectrum, std::size_t n, std::size_t p,
                                const EstimatorSpec& spec);

/// Convenience: spectrum computed from the raw n x p data matrix.
SelectionResult estimate_spikes(const Eigen::Ref<const Eigen::MatrixXd>& y,
                                const EstimatorSpec& spec, bool center = false);

/// k̂ = min{ j in 1..s : l_{j+1} - l_{j+2} < d_n }, or s flagged as saturated.
SelectionResult py_estimate(const EigenSpectrum& spectrum, std::size_t s, double d_n);

struct Schedules {
  double delta_n;
  double d_n;
};

/// delta_n = gamma n^(-1/4), d_n = beta n^(-5/8).
Schedules default_schedules(std::size_t n, double gamma = 1.0, double beta = 1.0);

}  // namespace spikecount
