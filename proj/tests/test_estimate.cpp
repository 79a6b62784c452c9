#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bgfit/errors.hpp"
#include "bgfit/estimate.hpp"
#include "bgfit/sampling.hpp"
#include "oracles.hpp"

using namespace bgfit;

namespace {

WaitSample simulate(const BetaGeometricLaw& law, std::size_t n, std::uint64_t stream) {
  const auto x = sample_bg(law, {kDefaultSeed, stream}, n);
  return WaitSample::from_delays(x);
}

double raw_m2(double a, double b) { return b * (a + 2.0 * b) / ((a - 1.0) * (a - 2.0)); }

}  // namespace

TEST_CASE("WaitSample summaries") {
  const std::vector<Delay> d{3, 0, 1, 3, 0};
  const auto s = WaitSample::from_delays(d);
  CHECK(s.n() == 5);
  CHECK(s.sum_x() == 7);
  CHECK(s.m1() == doctest::Approx(1.4));
  CHECK(s.m2() == doctest::Approx(19.0 / 5.0));
  CHECK(s.m2() >= s.m1() * s.m1());
  CHECK(s.bins().size() == 3);
  CHECK(s.delays() == std::vector<Delay>{0, 0, 1, 3, 3});

  const auto summary = WaitSample::from_summary(3767, 78112);
  CHECK_FALSE(summary.has_data());
  CHECK(summary.m1() == doctest::Approx(20.73586).epsilon(1e-6));
  CHECK_THROWS_AS(summary.m2(), MissingMomentsError);
  CHECK_THROWS_AS(summary.bins(), MissingMomentsError);
  CHECK_THROWS_AS(WaitSample::from_delays(std::vector<Delay>{}), DomainError);
  CHECK_THROWS_AS(WaitSample::from_delays(std::vector<Delay>{1, -1}), DomainError);
  CHECK_THROWS_AS(WaitSample::from_summary(0, 0), DomainError);
}

TEST_CASE("moment estimator on the application summary") {
  // Second raw moment implied by the reference moment estimates.
  const double m2 = raw_m2(20.4669, 403.663);
  CHECK(m2 == doctest::Approx(929.47).epsilon(1e-4));  // 929.50 from the rounded estimates
  const auto law = mme_from_moments(20.7358, 929.47);
  CHECK(oracle::rel_err(law.alpha(), 20.4669) < 5e-4);
  CHECK(oracle::rel_err(law.beta(), 403.663) < 5e-4);
  CHECK(oracle::rel_err(law.mean_fecundability(), 0.04825621) < 5e-4);
}

TEST_CASE("moment estimator inverts the moment formulas") {
  for (double a : {2.1, 3.0, 4.0, 20.4669, 400.0}) {
    for (double b : {0.5, 2.0, 4.0, 36.0, 403.663}) {
      CAPTURE(a);
      CAPTURE(b);
      const auto m = bg_moments({a, b});
      const auto law = mme_from_moments(m.mean_delay(), m.second_raw_moment());
      CHECK(oracle::rel_err(law.alpha(), a) < 1e-9);
      CHECK(oracle::rel_err(law.beta(), b) < 1e-9);
    }
  }
}

TEST_CASE("moment estimator rejects the invalid region") {
  // Geometric-like: m2 = m1 + 2 m1^2 makes the denominator vanish.
  CHECK_THROWS_AS(mme_from_moments(1.0, 3.0), InvalidMomentRegionError);
  // Underdispersed.
  CHECK_THROWS_AS(mme_from_moments(1.0, 2.0), InvalidMomentRegionError);
  // Positive denominator implies alpha > 2 whenever m1 > 0; m1 = 0 lands on
  // alpha = 2 exactly.
  CHECK_THROWS_AS(mme_from_moments(0.0, 5.0), InvalidMomentRegionError);

  const auto summary = WaitSample::from_summary(3767, 78112);
  CHECK_THROWS_AS(fit_mme(summary), MissingMomentsError);
  CHECK_THROWS_AS(fit_mme(WaitSample::from_delays(std::vector<Delay>{4})), DomainError);
}

TEST_CASE("moment fit carries a bootstrap covariance") {
  const auto s = simulate({4.0, 36.0}, 1000, 11);
  const auto fit = fit_mme(s, {.gamma = 0.05, .bootstrap_resamples = 200, .bootstrap_seed = {3, 0}});
  CHECK(fit.method == FitMethod::kMme);
  CHECK(fit.theta_hat == fit.alpha_hat / (fit.alpha_hat + fit.beta_hat));
  CHECK(fit.covariance.a12 == fit.covariance.a21);
  CHECK(fit.covariance.a11 > 0.0);
  CHECK(fit.covariance.det() >= 0.0);
  CHECK(fit.ci_alpha.contains(fit.alpha_hat));
  CHECK(fit.ci_beta.contains(fit.beta_hat));
  CHECK(fit.ci_theta.contains(fit.theta_hat));
  CHECK(fit.diagnostics.bootstrap_resamples == 200);

  const auto again = fit_mme(s, {.gamma = 0.05, .bootstrap_resamples = 200, .bootstrap_seed = {3, 0}});
  CHECK(again.covariance.a11 == fit.covariance.a11);

  const auto bare = fit_mme(s, {.gamma = 0.05, .bootstrap_resamples = 0, .bootstrap_seed = {}});
  CHECK(bare.alpha_hat == fit.alpha_hat);
  CHECK(std::isnan(bare.theta_se));
}

TEST_CASE("log-likelihood") {
  CHECK(std::abs(log_likelihood(WaitSample::from_delays(std::vector<Delay>{0}), {1.0, 1.0}) - std::log(0.5)) <
        1e-13);
  const double expected = std::log(0.4) + std::log(0.2) + std::log(0.2 * 4.0 / 7.0);
  CHECK(std::abs(log_likelihood(WaitSample::from_delays(std::vector<Delay>{0, 1, 2}), {2.0, 3.0}) - expected) <
        1e-13);

  const auto s = simulate({2.5, 9.0}, 300, 5);
  const BetaGeometricLaw law(3.0, 7.0);
  double direct = 0.0;
  for (Delay x : s.delays()) direct += bg_log_pmf(law, x);
  CHECK(oracle::rel_err(log_likelihood(s, law), direct) < 1e-12);
  CHECK_THROWS_AS(log_likelihood(WaitSample::from_summary(10, 4), law), MissingMomentsError);
}

TEST_CASE("score and information agree with finite differences") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(std::log(0.5), std::log(50.0));
  std::uniform_real_distribution<double> ub(std::log(0.5), std::log(500.0));
  for (int i = 0; i < 100; ++i) {
    const double a = std::exp(ua(rng));
    const double b = std::exp(ub(rng));
    const std::size_t n = i % 2 == 0 ? 50 : 500;
    const auto s = simulate({a, b}, n, 1000 + static_cast<std::uint64_t>(i));
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(n);

    const auto u = score(s, {a, b});
    const double ha = 1e-3 * a;
    const double hb = 1e-3 * b;
    const double fd_a = oracle::five_point_diff([&](double t) { return log_likelihood(s, {t, b}); }, a, ha);
    const double fd_b = oracle::five_point_diff([&](double t) { return log_likelihood(s, {a, t}); }, b, hb);
    CHECK(oracle::rel_err(u.u_alpha, fd_a) < 1e-6);
    CHECK(oracle::rel_err(u.u_beta, fd_b) < 1e-6);

    const auto info = observed_information(s, {a, b});
    CHECK(info.a12 == info.a21);
    const double d11 = -oracle::five_point_diff([&](double t) { return score(s, {t, b}).u_alpha; }, a, ha);
    const double d22 = -oracle::five_point_diff([&](double t) { return score(s, {a, t}).u_beta; }, b, hb);
    const double d12 = -oracle::five_point_diff([&](double t) { return score(s, {a, t}).u_alpha; }, b, hb);
    CHECK(oracle::rel_err(info.a11, d11) < 1e-5);
    CHECK(oracle::rel_err(info.a22, d22) < 1e-5);
    CHECK(oracle::rel_err(info.a12, d12) < 1e-5);
  }
}

TEST_CASE("score special case and sign of the beta component") {
  const auto one = WaitSample::from_delays(std::vector<Delay>{0});
  CHECK(std::abs(score(one, {1.0, 1.0}).u_alpha - 0.5) < 1e-14);
  for (double a : {0.7, 3.0, 40.0}) {
    for (double b : {0.9, 12.0}) {
      CHECK(std::abs(score(one, {a, b}).u_alpha - (1.0 / a - 1.0 / (a + b))) < 1e-13);
      // Differentiating ln pmf(0) = ln a - ln(a + b) in beta.
      CHECK(std::abs(score(one, {a, b}).u_beta + 1.0 / (a + b)) < 1e-13);
    }
  }
}

TEST_CASE("maximum likelihood on simulated data") {
  const auto s = simulate({4.0, 36.0}, 1000, 0);
  const auto fit = fit_mle(s);
  CHECK(fit.diagnostics.converged);
  CHECK(std::abs(fit.alpha_hat - 4.0) < 0.3 * 4.0);
  CHECK(std::abs(fit.theta_hat - 0.1) < 0.01);
  CHECK(fit.theta_hat == fit.alpha_hat / (fit.alpha_hat + fit.beta_hat));
  CHECK(score(s, fit.law()).max_abs() < 1e-8 * static_cast<double>(s.n()));
  CHECK(observed_information(s, fit.law()).positive_definite());
  CHECK(fit.covariance.positive_definite());
  CHECK(fit.covariance.a12 == fit.covariance.a21);
  CHECK(fit.theta_se > 0.0);
  CHECK(fit.ci_alpha.contains(fit.alpha_hat));
  CHECK(fit.ci_beta.contains(fit.beta_hat));
  CHECK(fit.ci_theta.contains(fit.theta_hat));

  const auto from_other_start = fit_mle(s, {.init = BetaGeometricLaw(1.0, 1.0)});
  CHECK(oracle::rel_err(from_other_start.alpha_hat, fit.alpha_hat) < 1e-6);
}

TEST_CASE("likelihood at the MLE dominates the moment estimate") {
  int compared = 0;
  for (std::uint64_t k = 0; k < 40; ++k) {
    const BetaGeometricLaw truth = k % 2 == 0 ? BetaGeometricLaw(4.0, 12.0) : BetaGeometricLaw(4.0, 2.0);
    const auto s = simulate(truth, 200, 500 + k);
    FitResult mme;
    try {
      mme = fit_mme(s, {.gamma = 0.05, .bootstrap_resamples = 0, .bootstrap_seed = {}});
    } catch (const InvalidMomentRegionError&) {
      continue;
    }
    const auto mle = fit_mle(s);
    CHECK(log_likelihood(s, mle.law()) >= log_likelihood(s, mme.law()));
    ++compared;
  }
  CHECK(compared > 30);
}

TEST_CASE("estimators are consistent") {
  for (auto truth : {BetaGeometricLaw(4.0, 36.0), BetaGeometricLaw(4.0, 12.0), BetaGeometricLaw(4.0, 4.0),
                     BetaGeometricLaw(4.0, 2.0)}) {
    CAPTURE(truth.beta());
    const double theta = truth.mean_fecundability();
    for (FitMethod method : {FitMethod::kMme, FitMethod::kMle}) {
      CAPTURE(to_string(method));
      std::vector<double> err_small;
      std::vector<double> err_large;
      for (std::uint64_t k = 0; k < 100; ++k) {
        for (std::size_t n : {100u, 1000u}) {
          const auto s = simulate(truth, n, (n << 20) + k);
          double th = 0.0;
          try {
            th = method == FitMethod::kMme
                     ? fit_mme(s, {.gamma = 0.05, .bootstrap_resamples = 0, .bootstrap_seed = {}}).theta_hat
                     : fit_mle(s).theta_hat;
          } catch (const Error&) {
            continue;
          }
          (n == 100 ? err_small : err_large).push_back(std::abs(th - theta));
        }
      }
      auto median = [](std::vector<double> v) {
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
      };
      REQUIRE(err_small.size() > 50);
      REQUIRE(err_large.size() > 50);
      CHECK(median(err_large) < median(err_small));
    }
  }
}

TEST_CASE("maximum likelihood errors") {
  CHECK_THROWS_AS(fit_mle(WaitSample::from_delays(std::vector<Delay>{0, 0, 0})), DegenerateDataError);
  CHECK_THROWS_AS(fit_mle(WaitSample::from_summary(100, 500)), MissingMomentsError);
  CHECK_THROWS_AS(fit_mle(WaitSample::from_delays(std::vector<Delay>{2})), DomainError);
  try {
    fit_mle(simulate({4.0, 12.0}, 300, 9), {.init = std::nullopt, .gamma = 0.05, .tol = 1e-10, .max_iterations = 1});
    FAIL("expected non-convergence");
  } catch (const NonConvergenceError& e) {
    CHECK(e.iterations() == 1);
    CHECK(e.last_alpha() > 0.0);
    CHECK(e.last_beta() > 0.0);
  }
}

TEST_CASE("geometric baseline") {
  // 1 / (1 + 20.73586)
  CHECK(fit_geometric(WaitSample::from_summary(3767, 78112)).theta() == doctest::Approx(0.0460069).epsilon(1e-6));
  CHECK(fit_geometric(WaitSample::from_delays(std::vector<Delay>{0, 0})).theta() == 1.0);
  CHECK(fit_geometric(WaitSample::from_delays(std::vector<Delay>{0, 2})).theta() == 0.5);
}

TEST_CASE("delta method") {
  // Reference ML estimates for the application data.
  const double a = 20.94735;
  const double b = 413.6093;
  CHECK(a / (a + b) == doctest::Approx(0.04820394).epsilon(1e-7));
  const auto [ga, gb] = theta_gradient(a, b);
  CHECK(ga == doctest::Approx(b / ((a + b) * (a + b))));
  CHECK(gb == doctest::Approx(-a / ((a + b) * (a + b))));
  const Matrix2 cov{4.0, 30.0, 30.0, 400.0};
  REQUIRE(cov.positive_definite());
  const double v = delta_method_theta_variance(a, b, cov);
  CHECK(v > 0.0);
  CHECK(v == doctest::Approx(ga * ga * 4.0 + 2.0 * ga * gb * 30.0 + gb * gb * 400.0));

  const auto ci = wald_interval(1.0, 0.5, 0.05);
  CHECK(ci.lo == doctest::Approx(1.0 - 0.5 * 1.959963984540054).epsilon(1e-12));
  CHECK(ci.hi == doctest::Approx(1.0 + 0.5 * 1.959963984540054).epsilon(1e-12));
  CHECK_THROWS_AS(wald_interval(1.0, 0.5, 0.0), DomainError);

  const Matrix2 inv = cov.inverse();
  CHECK(inv.a11 * cov.a11 + inv.a12 * cov.a21 == doctest::Approx(1.0));
  CHECK_THROWS_AS((Matrix2{1.0, 2.0, 2.0, 4.0}.inverse()), DomainError);
}
