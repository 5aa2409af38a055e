#pragma once

namespace rival {

// Digamma function psi(x) for x > 0, absolute error <= 1e-12.
double digamma(double x);

// Natural log of the gamma function for x > 0.
double log_gamma(double x);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// Chi-square CDF with df degrees of freedom at x >= 0.
double chi_square_cdf(int degrees_of_freedom, double x);

// Inverse chi-square CDF: returns x with CDF(x) = probability, within
// 1e-10 in probability space. Requires probability in [0, 1).
double chi_square_quantile(int degrees_of_freedom, double probability);

// Same, memoized on (df, probability). Thread-safe.
double chi_square_quantile_cached(int degrees_of_freedom, double probability);

}  // namespace rival
