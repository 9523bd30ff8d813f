#pragma once

namespace survlink {

/// Regularized lower incomplete gamma P(a, x) = gamma(a,x)/Gamma(a), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Upper incomplete gamma with the lower integration limit as the first
/// argument: Gamma(alpha; beta) = integral_alpha^inf x^(beta-1) e^(-x) dx.
/// Requires alpha >= 0, beta > 0. Gamma(0; beta) is the complete gamma.
double upper_incomplete_gamma(double alpha, double beta);

/// log of upper_incomplete_gamma(alpha, beta); stays finite where the plain
/// value underflows (large alpha).
double log_upper_incomplete_gamma(double alpha, double beta);

/// log of e^alpha * Gamma(alpha; beta). The exponential prefactor cancels the
/// e^(-alpha) tail decay analytically, so no precision is lost for large alpha.
double log_exp_scaled_upper_gamma(double alpha, double beta);

/// Quantile of the chi-squared distribution: x with P(Chi2_df <= x) = gamma.
double chi2_quantile(double gamma, int df);

}  // namespace survlink
