#pragma once

#include <cstdint>
#include <optional>

namespace bgfit {

// Conception delays are counted in completed cycles: x = 0, 1, 2, ...
using Delay = std::int64_t;

// Per-cycle conception probability held fixed for one couple.
class GeometricLaw {
 public:
  explicit GeometricLaw(double theta);
  double theta() const { return theta_; }
  double mean_delay() const { return (1.0 - theta_) / theta_; }

 private:
  double theta_;
};

// Beta(alpha, beta) mixing law for fecundability across couples.
class BetaLaw {
 public:
  BetaLaw(double alpha, double beta);
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double mean() const { return alpha_ / (alpha_ + beta_); }
  double variance() const;
  double log_pdf(double theta) const;

 private:
  double alpha_;
  double beta_;
};

// Moments of the delay X. The mean needs alpha > 1, the second moment and
// variance need alpha > 2; asking for a missing one throws
// MomentNotExistError instead of returning infinity.
class DelayMoments {
 public:
  DelayMoments(double mean_delay, std::optional<double> second_raw)
      : mean_(mean_delay), second_raw_(second_raw) {}
  double mean_delay() const { return mean_; }
  bool has_second_moment() const { return second_raw_.has_value(); }
  double second_raw_moment() const;
  double variance() const;

 private:
  double mean_;
  std::optional<double> second_raw_;
};

// Marginal law of the delay when X | theta ~ Geometric(theta) and
// theta ~ Beta(alpha, beta): P(X = x) = B(alpha + 1, x + beta) / B(alpha, beta).
class BetaGeometricLaw {
 public:
  BetaGeometricLaw(double alpha, double beta);
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  BetaLaw mixing() const { return BetaLaw(alpha_, beta_); }
  // E[theta] = alpha / (alpha + beta).
  double mean_fecundability() const { return alpha_ / (alpha_ + beta_); }
  // E[X] = beta / (alpha - 1); throws MomentNotExistError when alpha <= 1.
  double mean_delay() const;

  friend bool operator==(const BetaGeometricLaw&, const BetaGeometricLaw&) = default;

 private:
  double alpha_;
  double beta_;
};

// Weinberg-Gladen form: pi = alpha / (alpha + beta), shape = 1 / (alpha + beta).
// Their moments count cycles from 1, i.e. Y = X + 1.
struct WeinbergGladenParams {
  double pi;
  double shape;

  WeinbergGladenParams(double pi, double shape);
  // E[Y] = (1 - shape) / (pi - shape); needs pi > shape.
  double mean_cycles() const;
  // Var[Y] = Var[X]; needs pi > 2 shape.
  double variance() const;
};

struct CdfResult {
  double probability;
  // Upper bound on the mass between the summation cap and x; zero unless x
  // exceeded kCdfHardCap.
  double truncation_error;
};

inline constexpr Delay kCdfHardCap = 10'000'000;
inline constexpr double kTailTolerance = 1e-12;

double geom_pmf(const GeometricLaw& law, Delay x);

double bg_log_pmf(const BetaGeometricLaw& law, Delay x);

// P(X = x + 1) / P(X = x) = (x + beta) / (x + alpha + beta + 1).
double bg_pmf_ratio(const BetaGeometricLaw& law, Delay x);

// P(X > x) = B(alpha, x + 1 + beta) / B(alpha, beta) = pmf(x) (x + beta) / alpha,
// in log space.
double bg_log_survival(const BetaGeometricLaw& law, Delay x);

// Sum of pmf(0..x), tabulated with bg_pmf_ratio.
CdfResult bg_cdf(const BetaGeometricLaw& law, Delay x);

// Smallest cap with P(X > cap) < kTailTolerance, clamped to kCdfHardCap.
Delay bg_tail_cap(const BetaGeometricLaw& law);

// Throws MomentNotExistError (order 1) when alpha <= 1.
DelayMoments bg_moments(const BetaGeometricLaw& law);

WeinbergGladenParams to_wg(const BetaGeometricLaw& law);
BetaGeometricLaw from_wg(const WeinbergGladenParams& params);

}  // namespace bgfit
