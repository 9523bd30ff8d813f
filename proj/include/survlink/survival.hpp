#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "survlink/sample_set.hpp"

namespace survlink {

/// Any evaluable CDF over durations (seconds).
using CdfFn = std::function<double(double)>;

/// Outage probability and confidence level pair.
struct ReliabilityTarget {
  double epsilon;
  double gamma;

  ReliabilityTarget(double eps, double gam) : epsilon(eps), gamma(gam) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("ReliabilityTarget: epsilon must lie in (0,1)");
    if (!(gam > 0.0 && gam < 1.0)) throw ConfigError("ReliabilityTarget: gamma must lie in (0,1)");
  }
};

/// Right-continuous step CDF, F(x) = #{t_i <= x} / S.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(const SampleSet& samples);

  double operator()(double x) const;

  /// Smallest sample value whose CDF value exceeds p; +inf when none does.
  double upper_quantile(double p) const;

  const std::vector<double>& sorted_durations() const { return sorted_; }
  double max() const { return sorted_.back(); }

 private:
  std::vector<double> sorted_;
};

/// Conditional failure probability F_t(tau) = (F(t+tau) - F(t)) / (1 - F(t)).
/// Throws NumericalError when F(t) = 1 (conditioning on a null event).
double conditional_failure(const CdfFn& cdf, double t, double tau);

struct TauStarResult {
  double tau = 0.0;
  bool saturated = false;   // search horizon reached before the target level
};

/// Largest tau with F_t(tau) <= epsilon, by bracketing + bisection to
/// absolute tolerance `tol`. Saturates at `horizon` when the conditional CDF
/// never reaches the target level there.
TauStarResult solve_tau_star(const CdfFn& cdf, double t, double epsilon,
                             double horizon, double tol = 1e-9);

/// Step-inversion variant for empirical CDFs: returns the exact jump point,
/// sup{tau : F_t(tau) <= epsilon}. Horizon defaults to 100x the largest
/// observed duration.
TauStarResult solve_tau_star(const EmpiricalCdf& cdf, double t, double epsilon);

/// An evaluable conditional failure curve tau -> [0,1], values clamped.
class FailureCurve {
 public:
  explicit FailureCurve(std::function<double(double)> fn) : fn_(std::move(fn)) {}

  double operator()(double tau) const {
    double v = fn_(tau);
    return std::clamp(v, 0.0, 1.0);
  }

 private:
  std::function<double(double)> fn_;
};

}  // namespace survlink
