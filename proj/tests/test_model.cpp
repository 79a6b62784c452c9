#include <doctest.h>

#include <cmath>
#include <limits>

#include "bgfit/errors.hpp"
#include "bgfit/model.hpp"
#include "oracles.hpp"

using namespace bgfit;

TEST_CASE("geometric pmf") {
  CHECK(geom_pmf(GeometricLaw(1.0), 0) == 1.0);
  CHECK(geom_pmf(GeometricLaw(1.0), 3) == 0.0);
  CHECK(geom_pmf(GeometricLaw(0.5), 2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(geom_pmf(GeometricLaw(0.25), 1) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK_THROWS_AS(geom_pmf(GeometricLaw(0.5), -1), DomainError);
  CHECK_THROWS_AS(GeometricLaw(0.0), DomainError);
  CHECK_THROWS_AS(GeometricLaw(1.5), DomainError);
}

TEST_CASE("law validation") {
  CHECK_THROWS_AS(BetaGeometricLaw(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(BetaGeometricLaw(1.0, -2.0), DomainError);
  CHECK_THROWS_AS(BetaLaw(std::nan(""), 1.0), DomainError);
  const BetaLaw b(4.0, 36.0);
  CHECK(b.mean() == doctest::Approx(0.1));
  CHECK(b.variance() == doctest::Approx(4.0 * 36.0 / (1600.0 * 41.0)));
}

TEST_CASE("beta-geometric log pmf") {
  CHECK(std::abs(bg_log_pmf({2.0, 3.0}, 1) - std::log(0.2)) < 1e-14);
  CHECK(std::abs(bg_log_pmf({1.0, 1.0}, 3) - std::log(1.0 / 20.0)) < 1e-14);
  for (double a : {0.5, 4.0, 20.4669}) {
    for (double b : {0.5, 36.0, 403.663}) {
      CHECK(std::abs(bg_log_pmf({a, b}, 0) - std::log(a / (a + b))) < 1e-13);
    }
  }
  CHECK_THROWS_AS(bg_log_pmf({1.0, 1.0}, -1), DomainError);
}

TEST_CASE("pmf ratio") {
  CHECK(bg_pmf_ratio({2.0, 3.0}, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bg_pmf_ratio({1.0, 1.0}, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (Delay x : {0, 1, 10, 1000}) CHECK(bg_pmf_ratio({0.1, 50.0}, x) < 1.0);
  CHECK_THROWS_AS(bg_pmf_ratio({1.0, 1.0}, -1), DomainError);
}

TEST_CASE("ratio recurrence matches log pmf to 1e-12") {
  for (double a : {0.5, 2.0, 4.0, 20.0, 400.0}) {
    for (double b : {0.5, 4.0, 36.0, 400.0}) {
      const BetaGeometricLaw law(a, b);
      for (Delay x = 0; x < 60; ++x) {
        const double lhs = std::exp(bg_log_pmf(law, x + 1));
        const double rhs = std::exp(bg_log_pmf(law, x)) * bg_pmf_ratio(law, x);
        CHECK(oracle::rel_err(lhs, rhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("pmf equals the beta mixture integral") {
  for (double a : {0.5, 1.0, 4.0, 20.0}) {
    for (double b : {0.5, 2.0, 36.0}) {
      for (long x = 0; x <= 20; ++x) {
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(x);
        const double quad = oracle::mixture_pmf(a, b, x);
        CHECK(oracle::rel_err(std::exp(bg_log_pmf({a, b}, x)), quad) < 1e-8);
      }
    }
  }
}

TEST_CASE("cdf") {
  const BetaGeometricLaw law(2.0, 3.0);
  CHECK(bg_cdf(law, 0).probability == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(bg_cdf(law, 1).probability == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(std::abs(bg_cdf({4.0, 4.0}, 1'000'000).probability - 1.0) < 1e-9);
  CHECK(bg_cdf({4.0, 4.0}, 1'000'000).truncation_error == 0.0);
  double prev = 0.0;
  for (Delay x = 0; x < 50; ++x) {
    const double c = bg_cdf({0.7, 3.0}, x).probability;
    CHECK(c >= prev);
    // The survival function has the closed form pmf(x) (x + beta) / alpha.
    CHECK(std::abs(c - (1.0 - std::exp(bg_log_survival({0.7, 3.0}, x)))) < 1e-13);
    prev = c;
  }
  CHECK_THROWS_AS(bg_cdf(law, -1), DomainError);
}

TEST_CASE("normalization with the adaptive cap") {
  for (double a : {0.5, 1.0, 4.0, 20.0, 400.0}) {
    for (double b : {0.5, 2.0, 4.0, 36.0, 400.0}) {
      CAPTURE(a);
      CAPTURE(b);
      const BetaGeometricLaw law(a, b);
      const Delay cap = bg_tail_cap(law);
      const double total = bg_cdf(law, cap).probability;
      CHECK(total <= 1.0 + 1e-12);
      if (cap < kCdfHardCap) {
        CHECK(total >= 1.0 - 1e-9);
        CHECK(std::exp(bg_log_survival(law, cap)) < kTailTolerance);
        if (cap > 0) CHECK(std::exp(bg_log_survival(law, cap - 1)) >= kTailTolerance);
      } else {
        // Heavy tail: the neglected mass is reported instead.
        const auto beyond = bg_cdf(law, kCdfHardCap + 1);
        CHECK(beyond.truncation_error > 0.0);
        CHECK(std::abs(beyond.probability + beyond.truncation_error - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("moments") {
  const auto m = bg_moments({4.0, 36.0});
  CHECK(m.mean_delay() == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(m.second_raw_moment() == doctest::Approx(456.0).epsilon(1e-15));
  CHECK(m.variance() == doctest::Approx(312.0).epsilon(1e-14));
  // Application summary: E[x] = 78112 / 3767 = 20.73586.
  CHECK(bg_moments({20.4669, 403.663}).mean_delay() == doctest::Approx(20.73586).epsilon(1e-5));

  const auto m2 = bg_moments({2.0, 1.0});
  CHECK(m2.mean_delay() == 1.0);
  CHECK_FALSE(m2.has_second_moment());
  CHECK_THROWS_AS(m2.second_raw_moment(), MomentNotExistError);
  CHECK_THROWS_AS(m2.variance(), MomentNotExistError);
  CHECK_THROWS_AS(bg_moments({1.0, 3.0}), MomentNotExistError);
  CHECK_THROWS_AS(BetaGeometricLaw(0.5, 1.0).mean_delay(), MomentNotExistError);
}

TEST_CASE("moments match truncated sums") {
  for (double a : {4.0, 20.0, 400.0}) {
    for (double b : {0.5, 2.0, 4.0, 36.0, 400.0}) {
      CAPTURE(a);
      CAPTURE(b);
      const BetaGeometricLaw law(a, b);
      const auto m = bg_moments(law);
      const Delay cap = bg_tail_cap(law);
      // x^2 weights the tail more heavily than the cap criterion assumes;
      // extend the range for the second moment.
      const Delay cap2 = std::min<Delay>(cap * 100 + 100, kCdfHardCap);
      double pmf = std::exp(bg_log_pmf(law, 0));
      double s1 = 0.0;
      double s2 = 0.0;
      for (Delay x = 0; x <= cap2; ++x) {
        if (x > 0) pmf *= bg_pmf_ratio(law, x - 1);
        const double xd = static_cast<double>(x);
        if (x <= cap) s1 += xd * pmf;
        s2 += xd * xd * pmf;
      }
      CHECK(oracle::rel_err(s1, m.mean_delay()) < 1e-6);
      CHECK(oracle::rel_err(s2 - s1 * s1, m.variance()) < 1e-6);
    }
  }
}

TEST_CASE("Weinberg-Gladen reparameterization") {
  const auto wg = to_wg({4.0, 36.0});
  CHECK(wg.pi == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(wg.shape == doctest::Approx(0.025).epsilon(1e-15));
  const auto back = from_wg({0.1, 0.025});
  CHECK(back.alpha() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(back.beta() == doctest::Approx(36.0).epsilon(1e-14));

  // Variance from both closed forms at (4, 4): 56/9.
  const auto wg44 = to_wg({4.0, 4.0});
  CHECK(wg44.variance() == doctest::Approx(56.0 / 9.0).epsilon(1e-13));
  CHECK(bg_moments({4.0, 4.0}).variance() == doctest::Approx(56.0 / 9.0).epsilon(1e-13));

  for (double a : {1.5, 3.0, 4.0, 20.4669}) {
    for (double b : {0.3, 2.0, 36.0, 413.6093}) {
      const BetaGeometricLaw law(a, b);
      const auto p = to_wg(law);
      // Cycles counted from 1 in the WG form.
      CHECK(p.mean_cycles() == doctest::Approx(1.0 + law.mean_delay()).epsilon(1e-12));
      if (a > 2.0) CHECK(p.variance() == doctest::Approx(bg_moments(law).variance()).epsilon(1e-11));
      const auto r = from_wg(p);
      // Ulp-scale relative to alpha + beta: beta is recovered as a difference
      // when pi is near 1.
      const double ulp = 8.0 * std::numeric_limits<double>::epsilon() * (a + b);
      CHECK(std::abs(r.alpha() - a) <= ulp);
      CHECK(std::abs(r.beta() - b) <= ulp);
    }
  }
  CHECK_THROWS_AS(WeinbergGladenParams(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(WeinbergGladenParams(1.0, 0.1), DomainError);
  CHECK_THROWS_AS(WeinbergGladenParams(0.5, 0.0), DomainError);
}
