#include "survlink/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "survlink/errors.hpp"

namespace survlink {

EmpiricalCdf::EmpiricalCdf(const SampleSet& samples) : sorted_(samples.durations()) {
  if (sorted_.empty()) throw InsufficientDataError("EmpiricalCdf: empty sample set");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::upper_quantile(double p) const {
  const auto n = sorted_.size();
  // F(sorted_[i]) = (i+1)/n; first index with (i+1)/n > p.
  auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(n)));
  if (idx >= n) return std::numeric_limits<double>::infinity();
  // Guard against p*n landing exactly on an integer boundary in FP.
  while (idx < n && static_cast<double>(idx + 1) / static_cast<double>(n) <= p) ++idx;
  if (idx >= n) return std::numeric_limits<double>::infinity();
  return sorted_[idx];
}

double conditional_failure(const CdfFn& cdf, double t, double tau) {
  if (tau < 0.0) throw NumericalError("conditional_failure: tau must be nonnegative");
  const double ft = cdf(t);
  if (ft >= 1.0) throw NumericalError("conditional_failure: F(t) = 1, conditioning on a null event");
  const double v = (cdf(t + tau) - ft) / (1.0 - ft);
  return std::clamp(v, 0.0, 1.0);
}

TauStarResult solve_tau_star(const CdfFn& cdf, double t, double epsilon,
                             double horizon, double tol) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw NumericalError("solve_tau_star: epsilon must lie in (0,1)");
  const double ft = cdf(t);
  if (ft >= 1.0) throw NumericalError("solve_tau_star: F(t) = 1, conditioning on a null event");
  // F_t(tau) <= eps  <=>  F(t+tau) <= target
  const double target = epsilon + (1.0 - epsilon) * ft;

  if (cdf(t + horizon) <= target) return {horizon, true};

  // Expand until the target level is bracketed, then bisect on
  // "F(t+tau) <= target", whose boundary is the sup of the feasible set.
  double lo = 0.0;
  double hi = std::min(std::max(tol, 1e-6), horizon);
  while (cdf(t + hi) <= target) {
    lo = hi;
    hi = std::min(2.0 * hi, horizon);
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (cdf(t + mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

TauStarResult solve_tau_star(const EmpiricalCdf& cdf, double t, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw NumericalError("solve_tau_star: epsilon must lie in (0,1)");
  const double ft = cdf(t);
  if (ft >= 1.0) throw NumericalError("solve_tau_star: F(t) = 1, conditioning on a null event");
  const double target = epsilon + (1.0 - epsilon) * ft;
  const double horizon = 100.0 * cdf.max();

  const double jump = cdf.upper_quantile(target);
  if (!std::isfinite(jump)) return {horizon, true};
  // The feasible set is {tau : t + tau < jump}; its sup is jump - t.
  return {std::max(jump - t, 0.0), false};
}

}  // namespace survlink
