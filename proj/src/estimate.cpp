#include "bgfit/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "bgfit/errors.hpp"
#include "bgfit/specfn.hpp"

namespace bgfit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Iterates outside this box are treated as divergence toward the boundary.
constexpr double kParamFloor = 1e-10;
constexpr double kParamCeiling = 1e10;

// Largest change of ln(alpha) or ln(beta) per Newton step.
constexpr double kMaxLogStep = 2.0;

Matrix2 nan_matrix() { return {kNaN, kNaN, kNaN, kNaN}; }

void require_sample_size(const WaitSample& sample, const char* fn) {
  if (sample.n() < 2) {
    throw DomainError(std::string(fn) + ": need at least 2 observations");
  }
}

void fill_intervals(FitResult& fit) {
  const auto& c = fit.covariance;
  fit.theta_se = std::sqrt(delta_method_theta_variance(fit.alpha_hat, fit.beta_hat, c));
  fit.ci_alpha = wald_interval(fit.alpha_hat, std::sqrt(c.a11), fit.gamma);
  fit.ci_beta = wald_interval(fit.beta_hat, std::sqrt(c.a22), fit.gamma);
  fit.ci_theta = wald_interval(fit.theta_hat, fit.theta_se, fit.gamma);
}

// Log-likelihood with the parameter-only terms factored out of the data sum.
double loglik(const std::vector<WaitSample::Bin>& bins, double n, double a, double b) {
  double data_term = 0.0;
  for (const auto& bin : bins) {
    data_term += static_cast<double>(bin.count) *
                 specfn::log_beta(a + 1.0, static_cast<double>(bin.value) + b);
  }
  return data_term - n * specfn::log_beta(a, b);
}

}  // namespace

WaitSample WaitSample::from_delays(std::span<const Delay> delays) {
  if (delays.empty()) throw DomainError("WaitSample: no observations");
  std::map<Delay, std::int64_t> counts;
  for (Delay d : delays) {
    if (d < 0) throw DomainError("WaitSample: delays must be >= 0, got " + std::to_string(d));
    ++counts[d];
  }
  WaitSample s;
  s.n_ = static_cast<std::int64_t>(delays.size());
  s.bins_.reserve(counts.size());
  for (const auto& [value, count] : counts) {
    s.bins_.push_back({value, count});
    s.sum_x_ += value * count;
    s.sum_sq_ += static_cast<double>(value) * static_cast<double>(value) * static_cast<double>(count);
  }
  return s;
}

WaitSample WaitSample::from_summary(std::int64_t n, std::int64_t sum_x) {
  if (n < 1) throw DomainError("WaitSample: n must be >= 1");
  if (sum_x < 0) throw DomainError("WaitSample: sum_x must be >= 0");
  WaitSample s;
  s.n_ = n;
  s.sum_x_ = sum_x;
  return s;
}

double WaitSample::m2() const {
  if (!has_data()) throw MissingMomentsError("second moment unavailable: sample is summary-only (n, sum_x)");
  return sum_sq_ / static_cast<double>(n_);
}

const std::vector<WaitSample::Bin>& WaitSample::bins() const {
  if (!has_data()) throw MissingMomentsError("per-observation data unavailable: sample is summary-only (n, sum_x)");
  return bins_;
}

std::vector<Delay> WaitSample::delays() const {
  std::vector<Delay> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (const auto& bin : bins()) out.insert(out.end(), static_cast<std::size_t>(bin.count), bin.value);
  return out;
}

Matrix2 Matrix2::inverse() const {
  const double d = det();
  if (d == 0.0 || !std::isfinite(d)) throw DomainError("Matrix2::inverse: singular matrix");
  return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

std::string_view to_string(FitMethod m) { return m == FitMethod::kMme ? "mme" : "mle"; }

double Score::max_abs() const { return std::max(std::abs(u_alpha), std::abs(u_beta)); }

std::pair<double, double> theta_gradient(double alpha, double beta) {
  const double s = alpha + beta;
  return {beta / (s * s), -alpha / (s * s)};
}

double delta_method_theta_variance(double alpha, double beta, const Matrix2& c) {
  const auto [ga, gb] = theta_gradient(alpha, beta);
  return ga * ga * c.a11 + ga * gb * (c.a12 + c.a21) + gb * gb * c.a22;
}

Interval wald_interval(double estimate, double se, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("confidence level gamma must lie in (0, 1)");
  const double half = specfn::normal_quantile(1.0 - gamma / 2.0) * se;
  return {estimate - half, estimate + half};
}

BetaGeometricLaw mme_from_moments(double m1, double m2) {
  const double denom = m2 - m1 - 2.0 * m1 * m1;
  if (!(denom > 0.0)) {
    throw InvalidMomentRegionError(
        "moment estimator undefined: m2 - m1 - 2 m1^2 <= 0 (no overdispersion relative to the "
        "beta-geometric second moment)");
  }
  const double alpha = 2.0 * (m2 - m1 * m1) / denom;
  if (!(alpha > 2.0) || !std::isfinite(alpha)) {
    throw InvalidMomentRegionError("moment estimator undefined: alpha_hat <= 2, second moment would not exist");
  }
  const double beta = m1 * (alpha - 1.0);
  if (!(beta > 0.0)) throw InvalidMomentRegionError("moment estimator undefined: beta_hat <= 0");
  return {alpha, beta};
}

FitResult fit_mme(const WaitSample& sample, const MmeOptions& options) {
  require_sample_size(sample, "fit_mme");
  const auto law = mme_from_moments(sample.m1(), sample.m2());

  FitResult fit;
  fit.method = FitMethod::kMme;
  fit.alpha_hat = law.alpha();
  fit.beta_hat = law.beta();
  fit.theta_hat = law.alpha() / (law.alpha() + law.beta());
  fit.gamma = options.gamma;
  fit.diagnostics.converged = true;
  fit.covariance = nan_matrix();

  if (options.bootstrap_resamples > 0) {
    // Nonparametric bootstrap of (alpha_hat, beta_hat).
    const auto data = sample.delays();
    const auto n = static_cast<std::uint64_t>(data.size());
    RandomStream rng(options.bootstrap_seed);
    double sa = 0.0, sb = 0.0, saa = 0.0, sab = 0.0, sbb = 0.0;
    int ok = 0;
    for (int r = 0; r < options.bootstrap_resamples; ++r) {
      double s1 = 0.0, s2 = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(
            (static_cast<unsigned __int128>(rng.next_u64()) * n) >> 64);
        const auto x = static_cast<double>(data[idx]);
        s1 += x;
        s2 += x * x;
      }
      try {
        const auto b = mme_from_moments(s1 / static_cast<double>(n), s2 / static_cast<double>(n));
        sa += b.alpha();
        sb += b.beta();
        saa += b.alpha() * b.alpha();
        sab += b.alpha() * b.beta();
        sbb += b.beta() * b.beta();
        ++ok;
      } catch (const InvalidMomentRegionError&) {
        ++fit.diagnostics.bootstrap_failures;
      }
    }
    fit.diagnostics.bootstrap_resamples = options.bootstrap_resamples;
    if (ok >= 2) {
      const double k = ok;
      const double cab = (sab - sa * sb / k) / (k - 1.0);
      fit.covariance = {(saa - sa * sa / k) / (k - 1.0), cab, cab, (sbb - sb * sb / k) / (k - 1.0)};
    }
  }
  fill_intervals(fit);
  return fit;
}

double log_likelihood(const WaitSample& sample, const BetaGeometricLaw& law) {
  return loglik(sample.bins(), static_cast<double>(sample.n()), law.alpha(), law.beta());
}

Score score(const WaitSample& sample, const BetaGeometricLaw& law) {
  const double a = law.alpha();
  const double b = law.beta();
  const double n = static_cast<double>(sample.n());
  double sum_shift = 0.0;  // sum psi(x + beta)
  double sum_total = 0.0;  // sum psi(x + alpha + beta + 1)
  for (const auto& bin : sample.bins()) {
    const double x = static_cast<double>(bin.value);
    const double c = static_cast<double>(bin.count);
    sum_shift += c * specfn::digamma(x + b);
    sum_total += c * specfn::digamma(x + a + b + 1.0);
  }
  const double psi_ab = specfn::digamma(a + b);
  return {n * specfn::digamma(a + 1.0) + n * psi_ab - sum_total - n * specfn::digamma(a),
          sum_shift + n * psi_ab - sum_total - n * specfn::digamma(b)};
}

Matrix2 observed_information(const WaitSample& sample, const BetaGeometricLaw& law) {
  const double a = law.alpha();
  const double b = law.beta();
  const double n = static_cast<double>(sample.n());
  double sum_shift = 0.0;  // sum psi'(x + beta)
  double sum_total = 0.0;  // sum psi'(x + alpha + beta + 1)
  for (const auto& bin : sample.bins()) {
    const double x = static_cast<double>(bin.value);
    const double c = static_cast<double>(bin.count);
    sum_shift += c * specfn::trigamma(x + b);
    sum_total += c * specfn::trigamma(x + a + b + 1.0);
  }
  const double tri_ab = specfn::trigamma(a + b);
  const double cross = sum_total - n * tri_ab;
  return {n * specfn::trigamma(a) - n * specfn::trigamma(a + 1.0) - n * tri_ab + sum_total, cross,
          cross, n * specfn::trigamma(b) - sum_shift - n * tri_ab + sum_total};
}

FitResult fit_mle(const WaitSample& sample, const MleOptions& options) {
  require_sample_size(sample, "fit_mle");
  const auto& bins = sample.bins();
  if (sample.sum_x() == 0) {
    throw DegenerateDataError("fit_mle: every delay is zero; alpha_hat diverges");
  }
  const double n = static_cast<double>(sample.n());

  BetaGeometricLaw start = options.init.value_or(BetaGeometricLaw(1.0, 1.0));
  if (!options.init) {
    try {
      start = mme_from_moments(sample.m1(), sample.m2());
    } catch (const InvalidMomentRegionError&) {
      start = BetaGeometricLaw(1.0, sample.m1());
    }
  }

  double la = std::log(start.alpha());
  double lb = std::log(start.beta());
  double a = start.alpha();
  double b = start.beta();
  double ll = loglik(bins, n, a, b);
  const double tol = options.tol * n;

  int iter = 0;
  Score u{};
  for (;; ++iter) {
    const BetaGeometricLaw current(a, b);
    u = score(sample, current);
    if (u.max_abs() <= tol) break;
    if (iter >= options.max_iterations) {
      throw NonConvergenceError("fit_mle: no convergence after " + std::to_string(iter) + " iterations", a,
                                b, iter);
    }

    // Gradient and negated Hessian with respect to (ln alpha, ln beta).
    const Matrix2 info = observed_information(sample, current);
    const double ga = a * u.u_alpha;
    const double gb = b * u.u_beta;
    Matrix2 m{a * a * info.a11 - ga, a * b * info.a12, a * b * info.a21, b * b * info.a22 - gb};
    if (!std::isfinite(m.a11) || !std::isfinite(m.a22) || !std::isfinite(m.a12)) {
      throw NonConvergenceError("fit_mle: non-finite curvature", a, b, iter);
    }
    if (!m.positive_definite()) {
      // Levenberg shift until the model is a proper local maximum.
      double lambda = 1e-6 * (std::abs(m.a11) + std::abs(m.a22) + 1.0);
      Matrix2 shifted = m;
      do {
        shifted = {m.a11 + lambda, m.a12, m.a21, m.a22 + lambda};
        lambda *= 10.0;
      } while (!shifted.positive_definite());
      m = shifted;
    }
    const Matrix2 inv = m.inverse();
    double da = inv.a11 * ga + inv.a12 * gb;
    double db = inv.a21 * ga + inv.a22 * gb;
    const double longest = std::max(std::abs(da), std::abs(db));
    if (longest > kMaxLogStep) {
      da *= kMaxLogStep / longest;
      db *= kMaxLogStep / longest;
    }

    // Halving line search; only non-decreasing log-likelihood is accepted.
    // Close to the optimum the change in log L drops below its rounding
    // noise, and there a decrease of the score norm decides instead.
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(ll);
    const double noise = 1024.0 * std::numeric_limits<double>::epsilon() * std::abs(ll);
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      const double na = std::exp(la + da);
      const double nb = std::exp(lb + db);
      if (na < kParamFloor || nb < kParamFloor || na > kParamCeiling || nb > kParamCeiling) {
        throw DivergenceError("fit_mle: iterate drifted to the parameter boundary", na, nb, iter);
      }
      const double nll = loglik(bins, n, na, nb);
      const bool tie = std::isfinite(nll) && std::abs(nll - ll) <= noise &&
                       score(sample, {na, nb}).max_abs() < u.max_abs();
      if (tie || (std::isfinite(nll) && nll >= ll - slack)) {
        la += da;
        lb += db;
        a = na;
        b = nb;
        ll = std::max(ll, nll);
        accepted = true;
        break;
      }
      da *= 0.5;
      db *= 0.5;
    }
    if (!accepted) {
      throw NonConvergenceError("fit_mle: line search could not increase the log-likelihood", a, b, iter);
    }
  }

  FitResult fit;
  fit.method = FitMethod::kMle;
  fit.alpha_hat = a;
  fit.beta_hat = b;
  fit.theta_hat = a / (a + b);
  fit.gamma = options.gamma;
  fit.diagnostics.iterations = iter;
  fit.diagnostics.score_norm = u.max_abs();
  fit.diagnostics.converged = true;
  const Matrix2 info = observed_information(sample, BetaGeometricLaw(a, b));
  fit.covariance = info.positive_definite() ? info.inverse() : nan_matrix();
  fill_intervals(fit);
  return fit;
}

GeometricLaw fit_geometric(const WaitSample& sample) { return GeometricLaw(1.0 / (sample.m1() + 1.0)); }

}  // namespace bgfit
