// Test-only reference implementations, kept independent of the library code
// paths they validate.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

// Recursive adaptive Simpson quadrature with absolute/relative tolerance.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) return left + right + delta / 15.0;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int max_depth = 60) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Central finite difference d f / d x.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Inverse-transform sampling from Weibull(lambda, k), optionally conditioned
// on exceeding t: T = lambda * ((t/lambda)^k - ln(1-U))^(1/k).
inline std::vector<double> weibull_conditional_samples(double lambda, double k, double t,
                                                       std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  const double xk = t > 0.0 ? std::pow(t / lambda, k) : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    out[i] = lambda * std::pow(xk - std::log1p(-u), 1.0 / k);
  }
  return out;
}

// Exhaustive per-sample reference for the detection protocol: positives are
// the floor(eps*n) smallest test values (stable order), then every sample is
// categorized one by one.
struct BruteCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

inline BruteCounts brute_force_classify(const std::vector<double>& test, double epsilon,
                                        double tau_star) {
  const std::size_t n = test.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return test[a] < test[b]; });
  const auto npos = static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(n)));
  std::vector<bool> pos(n, false);
  for (std::size_t i = 0; i < npos; ++i) pos[order[i]] = true;

  BruteCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    if (test[i] < tau_star && pos[i]) ++c.tp;
    if (test[i] < tau_star && !pos[i]) ++c.fp;
    if (test[i] >= tau_star && pos[i]) ++c.fn;
    if (test[i] >= tau_star && !pos[i]) ++c.tn;
  }
  return c;
}

// Kolmogorov-Smirnov distance between samples and an analytic CDF.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n));
  }
  return d;
}

// Counting-rule ECDF evaluated directly from the definition.
inline double counting_ecdf(const std::vector<double>& samples, double x) {
  std::size_t c = 0;
  for (double s : samples) {
    if (s <= x) ++c;
  }
  return static_cast<double>(c) / static_cast<double>(samples.size());
}

}  // namespace oracles
