#include "spikecount/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spikecount {
namespace {

// Density pulled back through x = m - r cos(theta), which removes the
// square-root edge behaviour (and the 1/sqrt(x) pole at c = 1).
struct AngularIntegrand {
  double c, mid, radius;

  double operator()(double theta) const {
    const double x = mid - radius * std::cos(theta);
    const double s = std::sin(theta);
    if (x <= 1e-300) return radius / (std::numbers::pi * c);  // limit as x -> 0 when a = 0
    return radius * radius * s * s / (2.0 * std::numbers::pi * c * x);
  }
};

template <typename F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

MpLaw::MpLaw(const Ratio& ratio)
    : c(ratio.value()),
      lower(ratio.lower_edge()),
      upper(ratio.upper_edge()),
      mass_at_zero(std::max(0.0, 1.0 - 1.0 / ratio.value())) {}

double MpLaw::cdf(double x) const {
  if (x < 0.0) return 0.0;
  if (x < lower) return mass_at_zero;
  const double mid = 0.5 * (lower + upper);
  const double radius = 0.5 * (upper - lower);
  const double t = std::clamp((mid - std::min(x, upper)) / radius, -1.0, 1.0);
  const double theta = std::acos(t);
  const AngularIntegrand f{c, mid, radius};
  return mass_at_zero + adaptive_simpson(f, 0.0, theta, 1e-10);
}

double MpLaw::quantile(double prob) const {
  if (!(prob >= 0.0 && prob <= 1.0)) throw DomainError("MpLaw::quantile: prob must lie in [0, 1]");
  if (prob <= mass_at_zero) return 0.0;
  InversionOptions opts;
  opts.tolerance = 1e-10;
  return invert_monotone([this](double x) { return cdf(x); }, prob, lower, upper, opts);
}

}  // namespace spikecount
