#include "bgfit/model.hpp"

#include <cmath>
#include <string>

#include "bgfit/errors.hpp"
#include "bgfit/specfn.hpp"

namespace bgfit {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void require_nonnegative(Delay x, const char* fn) {
  if (x < 0) throw DomainError(std::string(fn) + ": delay must be >= 0, got " + std::to_string(x));
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

GeometricLaw::GeometricLaw(double theta) : theta_(theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw DomainError("GeometricLaw: theta must lie in (0, 1], got " + std::to_string(theta));
  }
}

BetaLaw::BetaLaw(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!positive_finite(alpha) || !positive_finite(beta)) {
    throw DomainError("BetaLaw: alpha and beta must be finite and > 0");
  }
}

double BetaLaw::variance() const {
  const double s = alpha_ + beta_;
  return alpha_ * beta_ / (s * s * (s + 1.0));
}

double BetaLaw::log_pdf(double theta) const {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError("BetaLaw::log_pdf: theta must lie in (0, 1)");
  }
  return (alpha_ - 1.0) * std::log(theta) + (beta_ - 1.0) * std::log1p(-theta) -
         specfn::log_beta(alpha_, beta_);
}

double DelayMoments::second_raw_moment() const {
  if (!second_raw_) throw MomentNotExistError("second moment of the delay requires alpha > 2", 2);
  return *second_raw_;
}

double DelayMoments::variance() const { return second_raw_moment() - mean_ * mean_; }

BetaGeometricLaw::BetaGeometricLaw(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!positive_finite(alpha) || !positive_finite(beta)) {
    throw DomainError("BetaGeometricLaw: alpha and beta must be finite and > 0");
  }
}

double BetaGeometricLaw::mean_delay() const {
  if (alpha_ <= 1.0) throw MomentNotExistError("mean delay requires alpha > 1", 1);
  return beta_ / (alpha_ - 1.0);
}

WeinbergGladenParams::WeinbergGladenParams(double pi_, double shape_) : pi(pi_), shape(shape_) {
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("WeinbergGladenParams: pi must lie in (0, 1)");
  if (!positive_finite(shape)) throw DomainError("WeinbergGladenParams: shape must be > 0");
}

double WeinbergGladenParams::mean_cycles() const {
  if (pi <= shape) throw MomentNotExistError("WG mean requires pi > shape", 1);
  return (1.0 - shape) / (pi - shape);
}

double WeinbergGladenParams::variance() const {
  if (pi <= 2.0 * shape) throw MomentNotExistError("WG variance requires pi > 2 shape", 2);
  const double d = pi - shape;
  return pi * (1.0 - pi) * (1.0 - shape) / (d * d * (pi - 2.0 * shape));
}

double geom_pmf(const GeometricLaw& law, Delay x) {
  require_nonnegative(x, "geom_pmf");
  const double q = 1.0 - law.theta();
  if (q == 0.0) return x == 0 ? 1.0 : 0.0;
  return law.theta() * std::exp(static_cast<double>(x) * std::log1p(-law.theta()));
}

double bg_log_pmf(const BetaGeometricLaw& law, Delay x) {
  require_nonnegative(x, "bg_log_pmf");
  const double a = law.alpha();
  const double b = law.beta();
  return specfn::log_beta(a + 1.0, static_cast<double>(x) + b) - specfn::log_beta(a, b);
}

double bg_pmf_ratio(const BetaGeometricLaw& law, Delay x) {
  require_nonnegative(x, "bg_pmf_ratio");
  const double xd = static_cast<double>(x);
  return (xd + law.beta()) / (xd + law.alpha() + law.beta() + 1.0);
}

double bg_log_survival(const BetaGeometricLaw& law, Delay x) {
  require_nonnegative(x, "bg_log_survival");
  const double a = law.alpha();
  const double b = law.beta();
  return specfn::log_beta(a, static_cast<double>(x) + 1.0 + b) - specfn::log_beta(a, b);
}

Delay bg_tail_cap(const BetaGeometricLaw& law) {
  const double log_tol = std::log(kTailTolerance);
  if (bg_log_survival(law, kCdfHardCap) >= log_tol) return kCdfHardCap;
  Delay lo = 0;  // invariant: survival(lo) >= tol unless lo == 0
  Delay hi = kCdfHardCap;
  if (bg_log_survival(law, 0) < log_tol) return 0;
  while (hi - lo > 1) {
    const Delay mid = lo + (hi - lo) / 2;
    if (bg_log_survival(law, mid) < log_tol) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

CdfResult bg_cdf(const BetaGeometricLaw& law, Delay x) {
  require_nonnegative(x, "bg_cdf");
  const Delay last = x > kCdfHardCap ? kCdfHardCap : x;
  CompensatedSum total;
  double pmf = std::exp(bg_log_pmf(law, 0));
  total.add(pmf);
  for (Delay k = 0; k < last; ++k) {
    pmf *= bg_pmf_ratio(law, k);
    total.add(pmf);
  }
  double truncation = 0.0;
  if (x > last) truncation = std::exp(bg_log_survival(law, last));
  return {total.value(), truncation};
}

DelayMoments bg_moments(const BetaGeometricLaw& law) {
  const double mean = law.mean_delay();
  const double a = law.alpha();
  const double b = law.beta();
  if (a <= 2.0) return {mean, std::nullopt};
  return {mean, b * (a + 2.0 * b) / ((a - 1.0) * (a - 2.0))};
}

WeinbergGladenParams to_wg(const BetaGeometricLaw& law) {
  const double s = law.alpha() + law.beta();
  return {law.alpha() / s, 1.0 / s};
}

BetaGeometricLaw from_wg(const WeinbergGladenParams& params) {
  return {params.pi / params.shape, (1.0 - params.pi) / params.shape};
}

}  // namespace bgfit
