#pragma once

#include <optional>
#include <string>

#include "survlink/sample_set.hpp"
#include "survlink/special_functions.hpp"

namespace survlink {

/// Weibull scale/shape pair, the parameter vector of the model-based estimator.
struct WeibullParams {
  double lambda;  // scale, seconds
  double k;       // shape

  WeibullParams(double scale, double shape) : lambda(scale), k(shape) {
    if (!(scale > 0.0) || !(shape > 0.0)) throw ConfigError("WeibullParams: scale and shape must be positive");
  }
};

/// F(t) = 1 - exp(-(t/lambda)^k), t >= 0.
double weibull_cdf(const WeibullParams& params, double t);

/// Negative log-likelihood of the samples, -sum_i log f(t_i).
double neg_log_likelihood(const WeibullParams& params, const SampleSet& samples);

struct NllGradient {
  double nll;
  double d_lambda;
  double d_k;
};

/// NLL together with its analytic gradient in (lambda, k).
NllGradient nll_with_gradient(const WeibullParams& params, const SampleSet& samples);

struct FitReport {
  WeibullParams params_hat;
  double nll_at_hat = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;  // in (log lambda, log k) coordinates

  std::string to_text() const;
};

/// Maximum-likelihood fit by full-batch gradient descent with backtracking
/// line search in (log lambda, log k). Initial point defaults to a
/// method-of-moments estimate on the log samples.
///
/// Throws DegenerateDataError when fewer than two samples or all samples
/// identical; a fit that exhausts its iteration budget is returned with
/// converged = false.
FitReport fit_mle(const SampleSet& samples, std::optional<WeibullParams> init = {});

/// Conditional failure probability
/// F_t(tau) = 1 - exp((t/lambda)^k - ((t+tau)/lambda)^k).
double cond_failure_weibull(const WeibullParams& params, double t, double tau);

/// Closed-form reliable transmission duration:
/// tau* = lambda ((t/lambda)^k - ln(1-eps))^(1/k) - t.
double tau_star_weibull(const WeibullParams& params, double t, double epsilon);

/// E[(t+tau)^N] = lambda^N e^((t/lambda)^k) Gamma((t/lambda)^k; 1 + N/k),
/// evaluated in log space so large (t/lambda)^k cannot overflow.
double conditional_moment(const WeibullParams& params, double t, int N);

/// E[t+tau] - t.
double remaining_mean(const WeibullParams& params, double t);

/// E[(t+tau)^2] - E[t+tau]^2.
double remaining_variance(const WeibullParams& params, double t);

/// Degrees of freedom used for the chi-squared quantile in the likelihood
/// ratio bound: `paper` uses the sample count, `profile` uses 1.
enum class DfMode { paper, profile };

DfMode df_mode_from_string(const std::string& name);
std::string to_string(DfMode mode);

struct ConfidenceBand {
  double tau_low = 0.0;
  double tau_hat = 0.0;
  double tau_high = 0.0;
  double gamma = 0.0;
  int df = 0;
  double delta = 0.0;      // shape prior half-width
  int prior_grid_size = 0;
  int priors_used = 0;     // priors that produced a likelihood-ratio crossing

  std::string to_text() const;
};

/// Likelihood-ratio confidence band for tau*. For each shape prior k on a
/// grid over [k_hat - delta, k_hat + delta], the scale is substituted by
/// lambda(tau, k) = ((t^k - (t+tau)^k)/ln(1-eps))^(1/k) and the scalar
/// equation NLL(lambda(tau,k), k) = NLL(theta_hat) + chi2/2 is solved for tau
/// by bracketing + bisection; the band is the [min, max] of all solutions.
ConfidenceBand confidence_bounds_tau(const SampleSet& samples, const FitReport& fit,
                                     double t, double epsilon, double gamma,
                                     double delta, int grid_size, DfMode df_mode);

}  // namespace survlink
