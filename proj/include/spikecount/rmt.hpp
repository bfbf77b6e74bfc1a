#pragma once

// Analytic function family for spiked sample covariance spectra: the
// deviance h, the spike-forward map, the spike-gain functions for the two
// aspect-ratio regimes, the Marchenko-Pastur law, consistency thresholds
// and the penalty levels of the modified AIC criteria.
//
// All functions are templated on the scalar so the same code can be
// evaluated in long double (or any type with std-compatible log/sqrt).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>

#include "spikecount/error.hpp"

namespace spikecount {

/// Ratio p/n of dimension to sample size. Always positive and finite.
template <typename Scalar = double>
class AspectRatio {
 public:
  explicit AspectRatio(Scalar c) : c_(c) {
    if (!(c > Scalar(0)) || !std::isfinite(static_cast<double>(c))) {
      std::ostringstream os;
      os << "c must be positive and finite (got " << static_cast<double>(c) << ")";
      throw DomainError(os.str());
    }
  }

  static AspectRatio from_shape(std::size_t p, std::size_t n) {
    if (n == 0) throw DomainError("sample size must be positive");
    return AspectRatio(Scalar(p) / Scalar(n));
  }

  Scalar value() const { return c_; }
  /// BBP phase-transition level 1 + sqrt(c).
  Scalar bbp() const { return Scalar(1) + std::sqrt(c_); }
  /// Upper MP edge (1 + sqrt(c))^2.
  Scalar upper_edge() const { return bbp() * bbp(); }
  Scalar lower_edge() const {
    const Scalar t = Scalar(1) - std::sqrt(c_);
    return t * t;
  }
  /// c > 1: more variables than observations; the qAIC family applies.
  bool large() const { return c_ > Scalar(1); }

 private:
  Scalar c_;
};

using Ratio = AspectRatio<double>;

/// h(x) = x - 1 - log x. Nonnegative with its unique zero at x = 1.
template <typename Scalar>
Scalar deviance(Scalar x) {
  if (!(x > Scalar(0))) throw DomainError("deviance: x must be positive");
  using std::log;
  return x - Scalar(1) - log(x);
}

/// Limit of a sample spike eigenvalue for a distant population spike x:
/// psi_c(x) = x + c x / (x - 1).
template <typename Scalar>
Scalar spike_forward(const AspectRatio<Scalar>& c, Scalar x) {
  if (!(x > Scalar(1))) throw DomainError("spike_forward: x must exceed 1");
  return x + c.value() * x / (x - Scalar(1));
}

namespace detail {
template <typename Scalar>
void require_supercritical(const AspectRatio<Scalar>& c, Scalar x, const char* who) {
  // A few ulps of slack so that bbp() recomputed by callers is accepted.
  const Scalar edge = c.bbp();
  if (x < edge * (Scalar(1) - std::numeric_limits<Scalar>::epsilon() * 4)) {
    std::ostringstream os;
    os << who << ": x = " << static_cast<double>(x) << " is below 1+sqrt(c) = "
       << static_cast<double>(edge);
    throw DomainError(os.str());
  }
}
}  // namespace detail

/// F_c(x) = h(psi_c(x)), strictly increasing on [1+sqrt(c), inf).
template <typename Scalar>
Scalar spike_gain_small(const AspectRatio<Scalar>& c, Scalar x) {
  detail::require_supercritical(c, x, "spike_gain_small");
  return deviance(spike_forward(c, x));
}

/// Q_c(x) = c h(psi_c(x) / c), defined for c > 1 on [1+sqrt(c), inf).
template <typename Scalar>
Scalar spike_gain_large(const AspectRatio<Scalar>& c, Scalar x) {
  if (!c.large()) throw DomainError("spike_gain_large: requires c > 1");
  detail::require_supercritical(c, x, "spike_gain_large");
  return c.value() * deviance(spike_forward(c, x) / c.value());
}

/// Density of the Marchenko-Pastur law on [a, b]; zero outside. The point
/// mass at the origin for c > 1 is not part of the density.
template <typename Scalar>
Scalar mp_density(const AspectRatio<Scalar>& c, Scalar x) {
  const Scalar a = c.lower_edge();
  const Scalar b = c.upper_edge();
  if (!(x > a) || !(x < b)) return Scalar(0);
  const Scalar pi = Scalar(3.14159265358979323846264338327950288L);
  return std::sqrt((b - x) * (x - a)) / (Scalar(2) * pi * x * c.value());
}

/// Marchenko-Pastur law summary. The cdf is a quadrature diagnostic only.
struct MpLaw {
  double c = 1.0;
  double lower = 0.0;
  double upper = 4.0;
  double mass_at_zero = 0.0;

  explicit MpLaw(const Ratio& ratio);

  double density(double x) const { return mp_density(Ratio(c), x); }
  /// Cumulative distribution including the atom at zero; absolute tolerance ~1e-8.
  double cdf(double x) const;
  /// Inverse of cdf on (mass_at_zero, 1]; used for bulk eigenvalue limits.
  double quantile(double prob) const;
  /// Integral of the density over [lower, upper].
  double bulk_mass() const { return cdf(upper) - mass_at_zero; }
};

// -- Monotone inversion -----------------------------------------------------

struct InversionOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
};

/// Solves f(x) = target on [lo, hi] for f strictly monotone (either
/// direction) by bracketed bisection with secant refinement. The result
/// satisfies |f(x) - target| <= tol * max(1, |target|).
template <typename Scalar, typename Function>
Scalar invert_monotone(const Function& f, Scalar target, Scalar lo, Scalar hi,
                       const InversionOptions& opts = {}) {
  using std::abs;
  if (!(lo <= hi)) throw BracketError("invert_monotone: empty bracket");
  const Scalar scale = std::max(Scalar(1), Scalar(abs(target)));
  const Scalar tol = Scalar(opts.tolerance) * scale;

  Scalar f_lo = f(lo) - target;
  Scalar f_hi = f(hi) - target;
  if (abs(f_lo) <= tol) return lo;
  if (abs(f_hi) <= tol) return hi;
  if ((f_lo > 0) == (f_hi > 0)) {
    std::ostringstream os;
    os << "invert_monotone: target " << static_cast<double>(target)
       << " not enclosed by [f(" << static_cast<double>(lo) << "), f("
       << static_cast<double>(hi) << ")]";
    throw BracketError(os.str());
  }

  Scalar best = abs(f_lo) < abs(f_hi) ? lo : hi;
  Scalar best_residual = std::min(abs(f_lo), abs(f_hi));
  auto take = [&](Scalar x, Scalar fx) {
    if (abs(fx) < best_residual) {
      best = x;
      best_residual = abs(fx);
    }
    if ((fx > 0) == (f_lo > 0)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
      f_hi = fx;
    }
  };

  for (int it = 0; it < opts.max_iterations; ++it) {
    const Scalar width = hi - lo;
    // Secant step; accepted only if it lands strictly inside the bracket.
    const Scalar xs = lo - f_lo * (hi - lo) / (f_hi - f_lo);
    if (xs > lo && xs < hi) {
      const Scalar fs = f(xs) - target;
      if (abs(fs) <= tol) return xs;
      take(xs, fs);
    }
    if (hi - lo > Scalar(0.5) * width) {
      const Scalar mid = lo + (hi - lo) / 2;
      const Scalar fm = f(mid) - target;
      if (abs(fm) <= tol) return mid;
      take(mid, fm);
    }
    if (hi - lo <= std::numeric_limits<Scalar>::epsilon() * 4 * std::max(Scalar(1), abs(hi))) {
      // Bracket collapsed to adjacent floats: the residual floor is reached.
      if (best_residual <= tol * 16) return best;
      break;
    }
  }
  std::ostringstream os;
  os << "invert_monotone: tolerance not reached (residual "
     << static_cast<double>(best_residual) << ")";
  throw ConvergenceError(os.str());
}

/// Inverse of an increasing function on the supercritical branch
/// [1+sqrt(c), inf). The upper bracket starts at 10 (1+sqrt(c)) and doubles
/// until the target is enclosed.
template <typename Scalar, typename Function>
Scalar invert_on_spike_branch(const AspectRatio<Scalar>& c, const Function& f, Scalar target,
                              const InversionOptions& opts = {}) {
  const Scalar lo = c.bbp();
  const Scalar f_lo = f(lo);
  if (target < f_lo) {
    std::ostringstream os;
    os << "target " << static_cast<double>(target) << " below branch minimum "
       << static_cast<double>(f_lo);
    throw BracketError(os.str());
  }
  Scalar hi = Scalar(10) * lo;
  for (int i = 0; f(hi) < target; ++i) {
    if (i >= 64) throw BracketError("invert_on_spike_branch: bracket expansion failed");
    hi *= 2;
  }
  return invert_monotone(f, target, lo, hi, opts);
}

// -- Thresholds and penalties -------------------------------------------------

template <typename Scalar = double>
struct ThresholdReport {
  Scalar c;
  Scalar bbp;        ///< 1 + sqrt(c)
  Scalar edge;       ///< (1 + sqrt(c))^2
  Scalar lambda_c;   ///< smallest spike for which classical AIC / qAIC is consistent
  Scalar gap;        ///< lambda_c - bbp: u(c) for c <= 1, v(c) for c > 1
};

/// Consistency threshold of classical AIC (c <= 1, solves F_c = 2c) or
/// qAIC (c > 1, solves Q_c = 2).
template <typename Scalar>
ThresholdReport<Scalar> thresholds(const AspectRatio<Scalar>& c, const InversionOptions& opts = {}) {
  Scalar lambda;
  if (c.large()) {
    lambda = invert_on_spike_branch(
        c, [&](Scalar x) { return spike_gain_large(c, x); }, Scalar(2), opts);
  } else {
    lambda = invert_on_spike_branch(
        c, [&](Scalar x) { return spike_gain_small(c, x); }, Scalar(2) * c.value(), opts);
  }
  return {c.value(), c.bbp(), c.upper_edge(), lambda, lambda - c.bbp()};
}

/// Per-parameter penalty level that makes the modified criterion consistent
/// for spikes above 1 + sqrt(c) + delta: F_c(1+sqrt(c)+delta)/c when c <= 1,
/// Q_c(1+sqrt(c)+delta) when c > 1. Equals 2 at delta = gap.
/// delta = 0 is accepted (experimental zero-gap estimator).
template <typename Scalar>
Scalar penalty_alpha(const AspectRatio<Scalar>& c, Scalar delta) {
  if (!(delta >= Scalar(0)) || !std::isfinite(static_cast<double>(delta)))
    throw DomainError("penalty_alpha: delta must be a finite value >= 0");
  const Scalar x = c.bbp() + delta;
  if (c.large()) return spike_gain_large(c, x);
  return spike_gain_small(c, x) / c.value();
}

}  // namespace spikecount
