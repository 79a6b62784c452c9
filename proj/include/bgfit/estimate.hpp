#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bgfit/model.hpp"
#include "bgfit/sampling.hpp"

namespace bgfit {

// Observed conception delays, or only their sufficient summary (n, sum_x).
//
// Full-data samples keep a sorted value histogram; every likelihood sum runs
// over distinct values, which is what makes thousands of Monte Carlo fits
// cheap.
class WaitSample {
 public:
  struct Bin {
    Delay value;
    std::int64_t count;
  };

  static WaitSample from_delays(std::span<const Delay> delays);
  static WaitSample from_summary(std::int64_t n, std::int64_t sum_x);

  std::int64_t n() const { return n_; }
  std::int64_t sum_x() const { return sum_x_; }
  double m1() const { return static_cast<double>(sum_x_) / static_cast<double>(n_); }
  // Throws MissingMomentsError on a summary-only sample.
  double m2() const;
  bool has_data() const { return !bins_.empty(); }
  // Throws MissingMomentsError on a summary-only sample.
  const std::vector<Bin>& bins() const;
  // Expands the histogram back to one entry per observation (sorted).
  std::vector<Delay> delays() const;

 private:
  WaitSample() = default;
  std::int64_t n_ = 0;
  std::int64_t sum_x_ = 0;
  double sum_sq_ = 0.0;
  std::vector<Bin> bins_;
};

struct Matrix2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double a22 = 0.0;

  double det() const { return a11 * a22 - a12 * a21; }
  bool positive_definite() const { return a11 > 0.0 && det() > 0.0; }
  // Throws DomainError when singular.
  Matrix2 inverse() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

enum class FitMethod { kMme, kMle };

std::string_view to_string(FitMethod m);

struct FitDiagnostics {
  int iterations = 0;
  double score_norm = 0.0;  // ||score||_inf at the returned point
  bool converged = false;
  int bootstrap_resamples = 0;
  int bootstrap_failures = 0;
};

struct FitResult {
  FitMethod method = FitMethod::kMle;
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double theta_hat = 0.0;  // alpha_hat / (alpha_hat + beta_hat)
  // Covariance of (alpha_hat, beta_hat). NaN entries when unavailable (MME
  // without bootstrap, or a singular information matrix).
  Matrix2 covariance;
  double theta_se = 0.0;
  double gamma = 0.05;  // intervals are at level 1 - gamma
  Interval ci_alpha;
  Interval ci_beta;
  Interval ci_theta;
  FitDiagnostics diagnostics;

  BetaGeometricLaw law() const { return {alpha_hat, beta_hat}; }
};

struct Score {
  double u_alpha = 0.0;
  double u_beta = 0.0;
  double max_abs() const;
};

// Inverts the first two raw moments:
//   alpha = 2 (m2 - m1^2) / (m2 - m1 - 2 m1^2),  beta = m1 (alpha - 1).
// Throws InvalidMomentRegionError when the denominator is not positive or
// alpha <= 2 (moment equations assume the second moment exists).
BetaGeometricLaw mme_from_moments(double m1, double m2);

struct MmeOptions {
  double gamma = 0.05;
  // 0 disables the bootstrap; covariance, SE and intervals are then NaN.
  int bootstrap_resamples = 500;
  SeedSpec bootstrap_seed{};
};

FitResult fit_mme(const WaitSample& sample, const MmeOptions& options = {});

double log_likelihood(const WaitSample& sample, const BetaGeometricLaw& law);

Score score(const WaitSample& sample, const BetaGeometricLaw& law);

// Negated Hessian of the log-likelihood in (alpha, beta).
Matrix2 observed_information(const WaitSample& sample, const BetaGeometricLaw& law);

struct MleOptions {
  std::optional<BetaGeometricLaw> init;
  double gamma = 0.05;
  double tol = 1e-10;  // on ||score||_inf / n
  int max_iterations = 500;
};

// Damped Newton on (ln alpha, ln beta).
FitResult fit_mle(const WaitSample& sample, const MleOptions& options = {});

// theta = 1 / (m1 + 1), the homogeneous-fecundability baseline.
GeometricLaw fit_geometric(const WaitSample& sample);

// Gradient of theta = alpha / (alpha + beta).
std::pair<double, double> theta_gradient(double alpha, double beta);

// g' C g with g = theta_gradient(alpha, beta).
double delta_method_theta_variance(double alpha, double beta, const Matrix2& covariance);

// estimate +/- z_{gamma/2} se.
Interval wald_interval(double estimate, double se, double gamma);

}  // namespace bgfit
