#include "bgfit/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "bgfit/errors.hpp"
#include "bgfit/specfn.hpp"

namespace bgfit {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

using Integrand = std::function<double(double)>;

// G7-K15 on [lo, hi]; returns the Kronrod estimate and writes |K - G|.
double gauss_kronrod(const Integrand& f, double lo, double hi, double& err) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double pair = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  err = std::abs((kronrod - gauss) * h);
  return kronrod * h;
}

double adaptive(const Integrand& f, double lo, double hi, double tol, int depth) {
  double err = 0.0;
  const double whole = gauss_kronrod(f, lo, hi, err);
  if (err <= tol || depth >= 40) return whole;
  const double mid = 0.5 * (lo + hi);
  return adaptive(f, lo, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, hi, 0.5 * tol, depth + 1);
}

// Integral of the Beta(a, b) density over [0, x], x < 1.
double lower_integral(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  const double log_norm = specfn::log_beta(a, b);
  const double mean = a / (a + b);
  const double sd = std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));

  // Breakpoints at mean +/- sd 2^j out to the endpoints: a single panel over
  // a long, nearly empty stretch can miss a skewed tail entirely.
  std::vector<double> cuts{0.0, x};
  if (mean > 0.0 && mean < x) cuts.push_back(mean);
  for (double step = sd; step < 1.0; step *= 2.0) {
    for (double t : {mean - step, mean + step}) {
      if (t > 0.0 && t < x) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  constexpr double kTol = 1e-12;
  double total = 0.0;
  if (a >= 1.0) {
    const Integrand pdf = [&](double t) {
      if (t <= 0.0 || t >= 1.0) return a == 1.0 && t <= 0.0 ? std::exp(-log_norm) : 0.0;
      return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - log_norm);
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += adaptive(pdf, cuts[i], cuts[i + 1], kTol, 0);
    return total;
  }
  // a < 1: substitute u = t^a to remove the singularity at 0:
  //   t^(a-1) dt = du / a.
  const Integrand transformed = [&](double u) {
    if (u <= 0.0) return std::exp(-log_norm) / a;
    const double t = std::pow(u, 1.0 / a);
    return std::exp((b - 1.0) * std::log1p(-t) - log_norm) / a;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += adaptive(transformed, std::pow(cuts[i], a), std::pow(cuts[i + 1], a), kTol, 0);
  }
  return total;
}

}  // namespace

BetaPrior::BetaPrior(double mu_, double nu_, std::string source_) : mu(mu_), nu(nu_), source(std::move(source_)) {
  if (!(mu > 0.0) || !(nu > 0.0) || !std::isfinite(mu) || !std::isfinite(nu)) {
    throw DomainError("BetaPrior: mu and nu must be finite and > 0");
  }
}

double beta_cdf(const BetaLaw& law, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = law.alpha();
  const double b = law.beta();
  // Integrate whichever side of the mean is the shorter tail.
  const double value = x <= law.mean() ? lower_integral(a, b, x) : 1.0 - lower_integral(b, a, 1.0 - x);
  return std::clamp(value, 0.0, 1.0);
}

double beta_quantile(const BetaLaw& law, double p, double tol) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("beta_quantile: p must lie in (0, 1)");
  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double c = beta_cdf(law, mid);
    if (std::abs(c - p) <= tol || hi - lo < 1e-16) break;
    if (c < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

double posterior_mean(const BetaPrior& prior, std::int64_t n, std::int64_t sum_x) {
  const double a = prior.mu + static_cast<double>(n);
  const double b = prior.nu + static_cast<double>(sum_x);
  return a / (a + b);
}

PosteriorSpec posterior(const BetaPrior& prior, const WaitSample& sample, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("posterior: gamma must lie in (0, 1)");
  const double a = prior.mu + static_cast<double>(sample.n());
  const double b = prior.nu + static_cast<double>(sample.sum_x());
  const BetaLaw post(a, b);
  return {a, b, a / (a + b), gamma,
          Interval{beta_quantile(post, gamma / 2.0), beta_quantile(post, 1.0 - gamma / 2.0)}};
}

BetaPrior empirical_prior(const FitResult& fit) {
  if (!fit.diagnostics.converged) throw DomainError("empirical_prior: fit did not converge");
  return {fit.alpha_hat, fit.beta_hat, "empirical:" + std::string(to_string(fit.method))};
}

ShrinkageWitness shrinkage_check(const BetaPrior& prior, const WaitSample& sample) {
  const double n = static_cast<double>(sample.n());
  const double data_mean = n / (n + static_cast<double>(sample.sum_x()));
  const double post = posterior_mean(prior, sample.n(), sample.sum_x());
  const double lo = std::min(prior.mean(), data_mean);
  const double hi = std::max(prior.mean(), data_mean);
  // One ulp-scale slack for the all-equal case.
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * hi;
  return {prior.mean(), post, data_mean, lo - slack <= post && post <= hi + slack};
}

}  // namespace bgfit
