#include "survlink/special_functions.hpp"

#include <cmath>
#include <limits>

#include "survlink/errors.hpp"

namespace survlink {

namespace {

constexpr int kMaxIter = 500;
const double kEps = std::numeric_limits<double>::epsilon();
const double kFpMin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();

// Series representation of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < kMaxIter; ++i) {
    ++ap;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NumericalError("gamma_p_series: no convergence");
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1; returns log h
// with Q(a, x) = exp(-x + a log x - lgamma(a)) * h.
double gamma_q_cf_log_h(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return std::log(h);
  }
  throw NumericalError("gamma_q_cf_log_h: no convergence");
}

double log_gamma_q_cf(double a, double x) {
  return -x + a * std::log(x) - std::lgamma(a) + gamma_q_cf_log_h(a, x);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw NumericalError("regularized_gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - std::exp(log_gamma_q_cf(a, x));
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw NumericalError("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return std::exp(log_gamma_q_cf(a, x));
}

double upper_incomplete_gamma(double alpha, double beta) {
  if (alpha < 0.0 || !(beta > 0.0)) throw NumericalError("upper_incomplete_gamma: bad arguments");
  if (alpha == 0.0) return std::tgamma(beta);
  return std::exp(log_upper_incomplete_gamma(alpha, beta));
}

double log_upper_incomplete_gamma(double alpha, double beta) {
  if (alpha < 0.0 || !(beta > 0.0)) throw NumericalError("log_upper_incomplete_gamma: bad arguments");
  if (alpha == 0.0) return std::lgamma(beta);
  if (alpha < beta + 1.0) {
    // Gamma(alpha; beta) = Gamma(beta)(1 - P(beta, alpha)); P stays well below 1 here.
    return std::lgamma(beta) + std::log1p(-gamma_p_series(beta, alpha));
  }
  return std::lgamma(beta) + log_gamma_q_cf(beta, alpha);
}

double log_exp_scaled_upper_gamma(double alpha, double beta) {
  if (alpha < 0.0 || !(beta > 0.0)) throw NumericalError("log_exp_scaled_upper_gamma: bad arguments");
  if (alpha == 0.0) return std::lgamma(beta);
  if (alpha < beta + 1.0) {
    return alpha + std::lgamma(beta) + std::log1p(-gamma_p_series(beta, alpha));
  }
  // e^alpha * Gamma(beta) * Q(beta, alpha) = exp(beta log alpha) * h.
  return beta * std::log(alpha) + gamma_q_cf_log_h(beta, alpha);
}

double chi2_quantile(double gamma, int df) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) throw NumericalError("chi2_quantile: gamma must lie in (0,1)");
  if (df < 1) throw NumericalError("chi2_quantile: df must be positive");
  const double a = 0.5 * df;

  // Bracket the root of P(a, x/2) = gamma, then bisect. The CDF is strictly
  // increasing so plain bisection to relative tolerance is enough.
  double lo = 0.0;
  double hi = df > 2 ? 2.0 * df : 8.0;
  while (regularized_gamma_p(a, 0.5 * hi) < gamma) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("chi2_quantile: bracket expansion failed");
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (regularized_gamma_p(a, 0.5 * mid) < gamma) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace survlink
