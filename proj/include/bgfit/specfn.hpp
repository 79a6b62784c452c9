#pragma once

// Special-function kernel shared by the likelihood, moment and sampling code.
// Everything downstream works in log space through these functions; nothing
// evaluates Gamma or Beta in linear space.

namespace bgfit::specfn {

// Error budget |computed - exact| <= abs_tol + rel_tol * |exact|.
// The absolute floor matters only near the zeros of lgamma (x = 1, 2) and
// of digamma (x ~ 1.4616), where a pure relative bound is not meaningful.
struct AccuracyBudget {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;

  bool accepts(double computed, double exact) const;
};

// Budget met on [1e-3, 1e6] by all four kernels below.
inline constexpr AccuracyBudget kKernelBudget{};

// ln Gamma(x), x > 0.
double log_gamma(double x);

// psi(x) = d/dx ln Gamma(x), x > 0.
double digamma(double x);

// psi'(x), x > 0.
double trigamma(double x);

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b), a, b > 0.
// Uses a Stirling-difference form when an argument is large so that the
// result does not lose digits to cancellation. Exactly symmetric.
double log_beta(double a, double b);

// Standard normal CDF; with normal_quantile, used for Wald intervals.
double normal_cdf(double z);

// Inverse of normal_cdf, p in (0, 1).
double normal_quantile(double p);

}  // namespace bgfit::specfn
