#pragma once

#include <string>

#include "bgfit/estimate.hpp"
#include "bgfit/model.hpp"

namespace bgfit {

// Beta(mu, nu) prior on per-cycle fecundability.
struct BetaPrior {
  double mu;
  double nu;
  // Where the hyperparameters came from: "explicit", "empirical:mme", ...
  std::string source = "explicit";

  BetaPrior(double mu, double nu, std::string source = "explicit");
  double mean() const { return mu / (mu + nu); }
};

// Posterior Beta(a_post, b_post) with its squared-error-loss point estimate
// (the posterior mean) and an equal-tailed credible interval.
struct PosteriorSpec {
  double a_post;
  double b_post;
  double mean;
  double gamma;
  Interval credible_interval;
};

// Conjugate update with the geometric likelihood theta^n (1 - theta)^sum_x:
// Beta(mu + n, nu + sum_x). Only (n, sum_x) are used, so summary-only
// samples are accepted.
PosteriorSpec posterior(const BetaPrior& prior, const WaitSample& sample, double gamma = 0.05);

// Posterior mean (n + mu) / (n + mu + sum_x + nu) without the interval.
double posterior_mean(const BetaPrior& prior, std::int64_t n, std::int64_t sum_x);

// Uses (alpha_hat, beta_hat) of a converged fit as (mu, nu).
BetaPrior empirical_prior(const FitResult& fit);

struct ShrinkageWitness {
  double prior_mean;
  double posterior_mean;
  double data_mean;  // n / (n + sum_x)
  bool between;      // posterior_mean lies weakly between the other two
};

ShrinkageWitness shrinkage_check(const BetaPrior& prior, const WaitSample& sample);

// Regularized incomplete beta I_x(a, b) by adaptive Gauss-Kronrod quadrature
// of the beta density.
double beta_cdf(const BetaLaw& law, double x);

// Inverse of beta_cdf by bisection; |beta_cdf(result) - p| <= tol.
double beta_quantile(const BetaLaw& law, double p, double tol = 1e-8);

}  // namespace bgfit
