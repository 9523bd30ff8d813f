#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "survlink/survival.hpp"
#include "survlink/weibull.hpp"

using namespace survlink;

TEST_CASE("weibull cdf closed-form values") {
  CHECK(weibull_cdf(WeibullParams(2.5, 1.7), 2.5) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(weibull_cdf(WeibullParams(2.5, 1.7), 0.0) == 0.0);
  CHECK(weibull_cdf(WeibullParams(1.0, 2.0), 2.0) == doctest::Approx(1.0 - std::exp(-4.0)));
}

TEST_CASE("negative log-likelihood closed-form values") {
  CHECK(neg_log_likelihood(WeibullParams(1.0, 1.0), SampleSet({1.0, 1.0})) == doctest::Approx(2.0));
  CHECK(neg_log_likelihood(WeibullParams(2.0, 1.0), SampleSet({2.0})) ==
        doctest::Approx(std::log(2.0) + 1.0));
}

TEST_CASE("analytic nll gradient matches central finite differences") {
  std::mt19937_64 rng(2024);
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  std::vector<double> data(64);
  for (auto& d : data) d = 0.02 + 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  const SampleSet samples(data);

  for (int rep = 0; rep < 50; ++rep) {
    const double lambda = uniform(0.05, 5.0);
    const double k = uniform(0.05, 5.0);
    const auto g = nll_with_gradient(WeibullParams(lambda, k), samples);

    const double hl = 1e-6 * lambda;
    const double fd_l = oracles::central_diff(
        [&](double x) { return neg_log_likelihood(WeibullParams(x, k), samples); }, lambda, hl);
    const double hk = 1e-6 * k;
    const double fd_k = oracles::central_diff(
        [&](double x) { return neg_log_likelihood(WeibullParams(lambda, x), samples); }, k, hk);

    CHECK(g.d_lambda == doctest::Approx(fd_l).epsilon(1e-5));
    CHECK(g.d_k == doctest::Approx(fd_k).epsilon(1e-5));
  }
}

TEST_CASE("mle recovers the generating parameters") {
  const auto data = oracles::weibull_conditional_samples(0.1, 1.5, 0.0, 10000, 99);
  const auto fit = fit_mle(SampleSet(data));
  CHECK(fit.converged);
  CHECK(fit.grad_norm < 1e-8);
  CHECK(fit.params_hat.lambda > 0.097);
  CHECK(fit.params_hat.lambda < 0.103);
  CHECK(fit.params_hat.k > 1.45);
  CHECK(fit.params_hat.k < 1.55);
}

TEST_CASE("mle on exponential data finds shape one and the sample mean") {
  const auto data = oracles::weibull_conditional_samples(0.37, 1.0, 0.0, 10000, 5);
  const SampleSet samples(data);
  const auto fit = fit_mle(samples);
  CHECK(fit.converged);
  CHECK(fit.params_hat.k > 0.96);
  CHECK(fit.params_hat.k < 1.04);
  const double mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
  CHECK(std::fabs(fit.params_hat.lambda - mean) / mean < 0.04);
}

TEST_CASE("mle improves on a caller-provided start") {
  const auto data = oracles::weibull_conditional_samples(1.0, 2.0, 0.0, 500, 11);
  const SampleSet samples(data);
  const WeibullParams init(3.0, 0.5);
  const auto fit = fit_mle(samples, init);
  CHECK(fit.converged);
  CHECK(fit.nll_at_hat <= neg_log_likelihood(init, samples));
}

TEST_CASE("degenerate data is rejected") {
  CHECK_THROWS_AS(fit_mle(SampleSet({1.0, 1.0})), DegenerateDataError);
  CHECK_THROWS_AS(fit_mle(SampleSet({2.0})), DegenerateDataError);
}

TEST_CASE("scale equivariance of the fit") {
  const auto data = oracles::weibull_conditional_samples(0.2, 1.3, 0.0, 2000, 17);
  std::vector<double> scaled(data);
  const double c = 7.5;
  for (auto& v : scaled) v *= c;
  const auto fit1 = fit_mle(SampleSet(data));
  const auto fit2 = fit_mle(SampleSet(scaled));
  CHECK(fit2.params_hat.lambda == doctest::Approx(c * fit1.params_hat.lambda).epsilon(1e-6));
  CHECK(fit2.params_hat.k == doctest::Approx(fit1.params_hat.k).epsilon(1e-6));
  CHECK(tau_star_weibull(fit2.params_hat, c * 0.1, 0.05) ==
        doctest::Approx(c * tau_star_weibull(fit1.params_hat, 0.1, 0.05)).epsilon(1e-6));
}

TEST_CASE("conditional failure closed form") {
  const WeibullParams p(1.0, 2.0);
  CHECK(cond_failure_weibull(p, 0.7, 0.0) == 0.0);
  CHECK(cond_failure_weibull(p, 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-3.0)));

  const WeibullParams expo(0.4, 1.0);
  for (double t : {0.0, 0.3, 2.0}) {
    CHECK(cond_failure_weibull(expo, t, 0.2) ==
          doctest::Approx(-std::expm1(-0.5)).epsilon(1e-12));
  }
}

TEST_CASE("closed-form conditional failure equals the generic composition") {
  for (double lambda : {0.1, 1.0, 4.0}) {
    for (double k : {0.6, 1.0, 2.7}) {
      const WeibullParams p(lambda, k);
      const CdfFn cdf = [p](double x) { return x <= 0.0 ? 0.0 : weibull_cdf(p, x); };
      for (double t : {0.0, 0.4 * lambda, 2.0 * lambda}) {
        for (double tau : {0.01 * lambda, 0.5 * lambda, 3.0 * lambda}) {
          CHECK(cond_failure_weibull(p, t, tau) ==
                doctest::Approx(conditional_failure(cdf, t, tau)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("closed-form tau*") {
  const WeibullParams expo(0.8, 1.0);
  for (double t : {0.0, 1.0, 9.0}) {
    CHECK(tau_star_weibull(expo, t, 0.25) == doctest::Approx(-0.8 * std::log(0.75)).epsilon(1e-12));
  }
  const WeibullParams p(2.0, 3.0);
  CHECK(tau_star_weibull(p, 0.0, 0.1) ==
        doctest::Approx(2.0 * std::pow(-std::log(0.9), 1.0 / 3.0)));
  // Inverse of the conditional-failure example: eps = F_1(1) recovers tau = 1.
  const WeibullParams q(1.0, 2.0);
  CHECK(tau_star_weibull(q, 1.0, 1.0 - std::exp(-3.0)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("tau* lands exactly on the outage budget") {
  for (double lambda : {0.05, 1.0, 20.0}) {
    for (double k : {0.5, 1.0, 3.0}) {
      const WeibullParams p(lambda, k);
      for (double t : {0.0, 0.2 * lambda, 5.0 * lambda}) {
        for (double eps : {1e-4, 0.1, 0.9}) {
          const double ts = tau_star_weibull(p, t, eps);
          CHECK(ts > 0.0);
          CHECK(cond_failure_weibull(p, t, ts) == doctest::Approx(eps).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("tau* monotonicity in epsilon and observation time") {
  const WeibullParams decreasing_hazard(1.0, 0.7);
  const WeibullParams increasing_hazard(1.0, 2.5);
  double prev = 0.0;
  for (double eps : {0.01, 0.05, 0.2, 0.5, 0.9}) {
    const double ts = tau_star_weibull(decreasing_hazard, 0.5, eps);
    CHECK(ts >= prev);
    prev = ts;
  }
  // k < 1: remaining life grows with age; k > 1: it shrinks.
  double prev_dec = 0.0;
  double prev_inc = 1e9;
  for (double t : {0.0, 0.5, 1.0, 3.0}) {
    const double a = tau_star_weibull(decreasing_hazard, t, 0.1);
    const double b = tau_star_weibull(increasing_hazard, t, 0.1);
    CHECK(a >= prev_dec);
    CHECK(b <= prev_inc);
    prev_dec = a;
    prev_inc = b;
  }
}

TEST_CASE("upper incomplete gamma closed-form values") {
  CHECK(upper_incomplete_gamma(0.0, 2.0) == doctest::Approx(1.0));
  CHECK(upper_incomplete_gamma(1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(upper_incomplete_gamma(1.0, 2.0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("upper incomplete gamma matches quadrature on a grid") {
  for (double alpha : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    for (double beta : {0.3, 1.0, 2.5, 7.0}) {
      const double upper = alpha + 60.0 + 20.0 * beta;
      const double ref = oracles::adaptive_simpson(
          [beta](double x) { return std::pow(x, beta - 1.0) * std::exp(-x); }, alpha, upper,
          1e-16 * std::tgamma(beta));
      CHECK(upper_incomplete_gamma(alpha, beta) == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("log-scaled variant is consistent with the plain value") {
  for (double alpha : {0.2, 2.0, 25.0}) {
    for (double beta : {0.5, 1.5, 4.0}) {
      const double log_scaled = log_exp_scaled_upper_gamma(alpha, beta);
      CHECK(log_scaled == doctest::Approx(alpha + log_upper_incomplete_gamma(alpha, beta)).epsilon(1e-11));
    }
  }
}

TEST_CASE("conditional moments: closed-form special cases") {
  // t = 0 reduces to the unconditional Weibull mean lambda Gamma(1 + 1/k).
  for (double lambda : {0.1, 2.0}) {
    for (double k : {0.8, 1.7}) {
      CHECK(conditional_moment(WeibullParams(lambda, k), 0.0, 1) ==
            doctest::Approx(lambda * std::tgamma(1.0 + 1.0 / k)).epsilon(1e-10));
    }
  }
  // Memoryless case: E[t + tau] = t + lambda for every t.
  for (double t : {0.0, 0.5, 10.0}) {
    CHECK(conditional_moment(WeibullParams(0.3, 1.0), t, 1) == doctest::Approx(t + 0.3).epsilon(1e-9));
  }
}

TEST_CASE("conditional moment matches quadrature of the conditional pdf") {
  // f_t(T) = (k/lambda^k) T^(k-1) exp((t/lambda)^k - (T/lambda)^k) for T >= t.
  for (double lambda : {0.5, 1.0}) {
    for (double k : {0.9, 2.0}) {
      for (double t : {0.3, 1.0}) {
        for (int n : {1, 2}) {
          const double xk = std::pow(t / lambda, k);
          const auto pdf = [&](double T) {
            return (k / std::pow(lambda, k)) * std::pow(T, k - 1.0) *
                   std::exp(xk - std::pow(T / lambda, k));
          };
          const double upper = lambda * std::pow(xk + 80.0, 1.0 / k);
          const double ref = oracles::adaptive_simpson(
              [&](double T) { return std::pow(T, n) * pdf(T); }, t, upper, 1e-13);
          CHECK(conditional_moment(WeibullParams(lambda, k), t, n) ==
                doctest::Approx(ref).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("moment identity through the survival-function integral") {
  // E[(t+tau)^N] via N integral tau^(N-1)(1 - F_t) dtau plus the binomial shift.
  const WeibullParams p(1.0, 2.0);
  const double t = 1.0;
  const auto survival = [&](double tau) { return 1.0 - cond_failure_weibull(p, t, tau); };
  const double upper = 6.0;
  const double e_tau = oracles::adaptive_simpson(survival, 0.0, upper, 1e-13);
  const double e_tau2 =
      2.0 * oracles::adaptive_simpson([&](double tau) { return tau * survival(tau); }, 0.0, upper, 1e-13);
  const double m1 = conditional_moment(p, t, 1);
  const double m2 = conditional_moment(p, t, 2);
  CHECK(m1 == doctest::Approx(t + e_tau).epsilon(1e-6));
  CHECK(m2 == doctest::Approx(t * t + 2.0 * t * e_tau + e_tau2).epsilon(1e-6));
  CHECK(remaining_mean(p, t) == doctest::Approx(e_tau).epsilon(1e-6));
  CHECK(remaining_variance(p, t) == doctest::Approx(e_tau2 - e_tau * e_tau).epsilon(1e-5));
}

TEST_CASE("conditional moment survives a large conditioning time") {
  // (t/lambda)^k = 1e6; the result must stay finite and barely above t.
  const WeibullParams p(0.001, 2.0);
  const double m = conditional_moment(p, 1.0, 1);
  CHECK(std::isfinite(m));
  CHECK(m > 1.0);
  CHECK(m < 1.0 + 1e-3);
}

TEST_CASE("chi-squared quantiles") {
  CHECK(chi2_quantile(0.95, 2) == doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-10));
  CHECK(chi2_quantile(0.5, 2) == doctest::Approx(1.3862943611198906).epsilon(1e-10));
  CHECK(chi2_quantile(0.95, 1) == doctest::Approx(3.841458820694124).epsilon(1e-8));

  // Independent check: integrating the chi2_1 pdf up to the quantile returns
  // gamma. Substituting x = u^2 removes the endpoint singularity.
  const double q1 = chi2_quantile(0.9, 1);
  const double p = oracles::adaptive_simpson(
      [](double u) { return 2.0 * std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); }, 0.0,
      std::sqrt(q1), 1e-14);
  CHECK(p == doctest::Approx(0.9).epsilon(1e-8));
}
