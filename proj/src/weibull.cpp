#include "survlink/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace survlink {

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

struct LogStats {
  std::vector<double> logs;   // log t_i
  double sum_logs = 0.0;
  double mean_logs = 0.0;
  double var_logs = 0.0;
};

LogStats log_stats(const SampleSet& samples) {
  LogStats st;
  st.logs.reserve(samples.size());
  long double sum = 0.0L;
  for (double t : samples.durations()) {
    double l = std::log(t);
    st.logs.push_back(l);
    sum += l;
  }
  st.sum_logs = static_cast<double>(sum);
  st.mean_logs = static_cast<double>(sum / static_cast<long double>(samples.size()));
  long double q = 0.0L;
  for (double l : st.logs) {
    long double d = l - st.mean_logs;
    q += d * d;
  }
  st.var_logs = static_cast<double>(q / static_cast<long double>(samples.size()));
  return st;
}

// NLL and gradient in (u, v) = (log lambda, log k). Long-double accumulation
// keeps the gradient noise floor well below the 1e-8 convergence tolerance.
struct LogCoordEval {
  double nll;
  double du;
  double dv;
};

LogCoordEval nll_grad_log(const LogStats& st, double n, double u, double v) {
  const double k = std::exp(v);
  long double a0 = 0.0L;  // sum exp(k w_i)
  long double a1 = 0.0L;  // sum w_i exp(k w_i)
  for (double l : st.logs) {
    const double w = l - u;
    const double e = std::exp(k * w);
    a0 += e;
    a1 += static_cast<long double>(w) * e;
  }
  LogCoordEval out;
  out.nll = -n * v + n * k * u - (k - 1.0) * st.sum_logs + static_cast<double>(a0);
  out.du = k * (n - static_cast<double>(a0));
  out.dv = -n + k * (n * u - st.sum_logs + static_cast<double>(a1));
  return out;
}

}  // namespace

double weibull_cdf(const WeibullParams& params, double t) {
  if (t < 0.0) throw NumericalError("weibull_cdf: t must be nonnegative");
  if (t == 0.0) return 0.0;
  return -std::expm1(-std::pow(t / params.lambda, params.k));
}

double neg_log_likelihood(const WeibullParams& params, const SampleSet& samples) {
  const double k = params.k;
  const double log_lambda = std::log(params.lambda);
  long double nll = 0.0L;
  for (double t : samples.durations()) {
    if (!(t > 0.0)) throw DataError("neg_log_likelihood: samples must be positive");
    const double w = std::log(t) - log_lambda;
    nll += -std::log(k) - (k - 1.0) * w + log_lambda + std::exp(k * w);
  }
  return static_cast<double>(nll);
}

NllGradient nll_with_gradient(const WeibullParams& params, const SampleSet& samples) {
  const auto st = log_stats(samples);
  const double n = static_cast<double>(samples.size());
  const double u = std::log(params.lambda);
  const double v = std::log(params.k);
  const auto e = nll_grad_log(st, n, u, v);
  // d/dlambda = (1/lambda) d/du, d/dk = (1/k) d/dv.
  return {e.nll, e.du / params.lambda, e.dv / params.k};
}

std::string FitReport::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "lambda_hat=" << params_hat.lambda << "\n"
     << "k_hat=" << params_hat.k << "\n"
     << "nll_at_hat=" << nll_at_hat << "\n"
     << "iterations=" << iterations << "\n"
     << "converged=" << (converged ? "true" : "false") << "\n"
     << "grad_norm=" << grad_norm << "\n";
  return os.str();
}

FitReport fit_mle(const SampleSet& samples, std::optional<WeibullParams> init) {
  const std::size_t s = samples.size();
  if (s < 2) throw DegenerateDataError("fit_mle: need at least two samples");
  const auto [mn, mx] = std::minmax_element(samples.durations().begin(), samples.durations().end());
  if (*mn == *mx) throw DegenerateDataError("fit_mle: all samples identical, shape diverges");

  const auto st = log_stats(samples);
  const double n = static_cast<double>(s);

  double u, v;
  if (init) {
    u = std::log(init->lambda);
    v = std::log(init->k);
  } else {
    // Method of moments on logs: Var(log T) = pi^2 / (6 k^2),
    // E[log T] = log lambda - euler_gamma / k.
    const double sd = std::sqrt(std::max(st.var_logs, 1e-300));
    const double k0 = std::clamp(M_PI / (std::sqrt(6.0) * sd), 1e-3, 1e3);
    u = st.mean_logs + kEulerGamma / k0;
    v = std::log(k0);
  }

  constexpr double kGradTol = 1e-8;
  constexpr int kMaxIter = 20000;

  auto eval = nll_grad_log(st, n, u, v);
  double step = 1.0 / n;
  int iter = 0;
  for (; iter < kMaxIter; ++iter) {
    const double gn2 = eval.du * eval.du + eval.dv * eval.dv;
    if (std::sqrt(gn2) < kGradTol) break;

    // Armijo backtracking along the steepest descent direction.
    bool moved = false;
    for (int bt = 0; bt < 80; ++bt) {
      const double nu = u - step * eval.du;
      const double nv = v - step * eval.dv;
      const auto trial = nll_grad_log(st, n, nu, nv);
      if (std::isfinite(trial.nll) && trial.nll <= eval.nll - 1e-4 * step * gn2) {
        u = nu;
        v = nv;
        eval = trial;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // stuck at numerical resolution
    step *= 2.0;
  }

  FitReport report{WeibullParams(std::exp(u), std::exp(v))};
  report.nll_at_hat = eval.nll;
  report.iterations = iter;
  report.grad_norm = std::hypot(eval.du, eval.dv);
  report.converged = report.grad_norm < kGradTol;
  return report;
}

double cond_failure_weibull(const WeibullParams& params, double t, double tau) {
  if (t < 0.0 || tau < 0.0) throw NumericalError("cond_failure_weibull: t and tau must be nonnegative");
  const double x = t > 0.0 ? std::pow(t / params.lambda, params.k) : 0.0;
  const double y = std::pow((t + tau) / params.lambda, params.k);
  return -std::expm1(x - y);
}

double tau_star_weibull(const WeibullParams& params, double t, double epsilon) {
  if (t < 0.0) throw NumericalError("tau_star_weibull: t must be nonnegative");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw NumericalError("tau_star_weibull: epsilon must lie in (0,1)");
  const double l = -std::log1p(-epsilon);  // -ln(1-eps) > 0
  if (t == 0.0) return params.lambda * std::pow(l, 1.0 / params.k);
  // tau* = t (exp(log1p(l/x)/k) - 1) with x = (t/lambda)^k; stable when tau* << t.
  const double x = std::pow(t / params.lambda, params.k);
  return t * std::expm1(std::log1p(l / x) / params.k);
}

double conditional_moment(const WeibullParams& params, double t, int N) {
  if (t < 0.0) throw NumericalError("conditional_moment: t must be nonnegative");
  if (N < 1) throw NumericalError("conditional_moment: N must be a positive integer");
  const double a = 1.0 + static_cast<double>(N) / params.k;
  const double x = t > 0.0 ? std::pow(t / params.lambda, params.k) : 0.0;
  // log E[(t+tau)^N] = N log lambda + x + log Gamma(x; a). The scaled form
  // avoids the x / -x cancellation when x is large.
  const double log_m = N * std::log(params.lambda) + log_exp_scaled_upper_gamma(x, a);
  return std::exp(log_m);
}

double remaining_mean(const WeibullParams& params, double t) {
  return conditional_moment(params, t, 1) - t;
}

double remaining_variance(const WeibullParams& params, double t) {
  const double m1 = conditional_moment(params, t, 1);
  const double m2 = conditional_moment(params, t, 2);
  return m2 - m1 * m1;
}

DfMode df_mode_from_string(const std::string& name) {
  if (name == "paper") return DfMode::paper;
  if (name == "profile") return DfMode::profile;
  throw ConfigError("unknown df mode '" + name + "' (expected paper or profile)");
}

std::string to_string(DfMode mode) { return mode == DfMode::paper ? "paper" : "profile"; }

std::string ConfidenceBand::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "tau_low_s=" << tau_low << "\n"
     << "tau_hat_s=" << tau_hat << "\n"
     << "tau_high_s=" << tau_high << "\n"
     << "gamma=" << gamma << "\n"
     << "df=" << df << "\n"
     << "delta=" << delta << "\n"
     << "prior_grid_size=" << prior_grid_size << "\n"
     << "priors_used=" << priors_used << "\n";
  return os.str();
}

namespace {

// NLL profiled onto the tau axis for a fixed shape prior:
// lambda(tau)^k = ((t+tau)^k - t^k) / l with l = -ln(1-eps), so
// NLL(tau) = S log(D/l) - S log k - (k-1) B + A_k l / D,  D = (t+tau)^k - t^k.
struct PriorSolver {
  double k;
  double n;
  double sum_logs;
  double a_k;   // sum t_i^k
  double t_k;   // t^k
  double t;
  double l;     // -ln(1-eps)

  double nll(double tau) const {
    const double d = std::pow(t + tau, k) - t_k;
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    return n * (std::log(d / l) - std::log(k)) - (k - 1.0) * sum_logs + a_k * l / d;
  }
};

}  // namespace

ConfidenceBand confidence_bounds_tau(const SampleSet& samples, const FitReport& fit,
                                     double t, double epsilon, double gamma,
                                     double delta, int grid_size, DfMode df_mode) {
  if (!fit.converged) throw DataError("confidence_bounds_tau: fit did not converge");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("confidence_bounds_tau: epsilon must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("confidence_bounds_tau: gamma must lie in (0,1)");
  if (!(delta > 0.0)) throw ConfigError("confidence_bounds_tau: delta must be positive");
  if (grid_size < 1) throw ConfigError("confidence_bounds_tau: grid_size must be positive");
  if (t < 0.0) throw ConfigError("confidence_bounds_tau: t must be nonnegative");

  const double k_hat = fit.params_hat.k;
  const int df = df_mode == DfMode::paper ? static_cast<int>(samples.size()) : 1;
  const double threshold = fit.nll_at_hat + 0.5 * chi2_quantile(gamma, df);
  const double tau_hat = tau_star_weibull(fit.params_hat, t, epsilon);
  const double l = -std::log1p(-epsilon);
  const double n = static_cast<double>(samples.size());

  std::vector<double> priors;
  priors.reserve(static_cast<std::size_t>(grid_size) + 1);
  const double k_lo = std::max(k_hat - delta, 1e-6 * k_hat);
  const double k_hi = k_hat + delta;
  for (int i = 0; i < grid_size; ++i) {
    priors.push_back(grid_size == 1 ? k_hat
                                    : k_lo + (k_hi - k_lo) * static_cast<double>(i) / (grid_size - 1));
  }
  // The MLE shape must be among the priors so the band brackets tau_hat.
  bool has_center = false;
  for (double k : priors) {
    if (std::fabs(k - k_hat) <= 1e-12 * k_hat) has_center = true;
  }
  if (!has_center) priors.push_back(k_hat);

  double lo_root = std::numeric_limits<double>::infinity();
  double hi_root = -std::numeric_limits<double>::infinity();
  int used = 0;

  constexpr double kTauTol = 1e-9;

  for (double k : priors) {
    long double a_k = 0.0L;
    long double b = 0.0L;
    for (double ti : samples.durations()) {
      a_k += std::pow(static_cast<long double>(ti), static_cast<long double>(k));
      b += std::log(static_cast<long double>(ti));
    }
    PriorSolver ps{k, n, static_cast<double>(b), static_cast<double>(a_k),
                   t > 0.0 ? std::pow(t, k) : 0.0, t, l};

    // Profile scale MLE for this prior; the corresponding tau is the
    // minimizer of the profiled NLL along the tau axis.
    const double lambda_k = std::pow(static_cast<double>(a_k) / n, 1.0 / k);
    const double tau_c = tau_star_weibull(WeibullParams(lambda_k, k), t, epsilon);
    if (ps.nll(tau_c) >= threshold) continue;  // level never crossed for this prior

    // Lower crossing in (0, tau_c].
    double hi = tau_c;
    double lo = tau_c;
    bool bracketed = false;
    for (int i = 0; i < 1024; ++i) {
      lo *= 0.5;
      if (ps.nll(lo) >= threshold) {
        bracketed = true;
        break;
      }
      hi = lo;
    }
    if (bracketed) {
      while (hi - lo > kTauTol) {
        const double mid = 0.5 * (lo + hi);
        (ps.nll(mid) >= threshold ? lo : hi) = mid;
      }
      lo_root = std::min(lo_root, 0.5 * (lo + hi));
    } else {
      lo_root = std::min(lo_root, 0.0);  // NLL stays below the level down to tau = 0
    }

    // Upper crossing in [tau_c, inf); the profiled NLL grows without bound.
    lo = tau_c;
    hi = tau_c;
    bracketed = false;
    for (int i = 0; i < 1024; ++i) {
      hi *= 2.0;
      if (!std::isfinite(hi)) break;
      if (ps.nll(hi) >= threshold) {
        bracketed = true;
        break;
      }
      lo = hi;
    }
    if (!bracketed) throw NumericalError("confidence_bounds_tau: upper bracket expansion failed");
    while (hi - lo > kTauTol) {
      const double mid = 0.5 * (lo + hi);
      (ps.nll(mid) >= threshold ? hi : lo) = mid;
    }
    hi_root = std::max(hi_root, 0.5 * (lo + hi));
    ++used;
  }

  if (used == 0) throw NumericalError("confidence_bounds_tau: no shape prior produced a level crossing");

  ConfidenceBand band;
  band.tau_low = std::min(lo_root, tau_hat);
  band.tau_hat = tau_hat;
  band.tau_high = std::max(hi_root, tau_hat);
  band.gamma = gamma;
  band.df = df;
  band.delta = delta;
  band.prior_grid_size = grid_size;
  band.priors_used = used;
  return band;
}

}  // namespace survlink
