#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "survlink/survival.hpp"

using namespace survlink;

TEST_CASE("empirical cdf follows the counting rule") {
  EmpiricalCdf cdf(SampleSet({1.0, 2.0, 3.0}));
  CHECK(cdf(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(cdf(0.5) == 0.0);
  CHECK(cdf(10.0) == 1.0);
  CHECK(cdf(1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("empirical cdf rejects an empty sample set") {
  CHECK_THROWS_AS(EmpiricalCdf(SampleSet{}), InsufficientDataError);
}

TEST_CASE("empirical cdf matches brute-force counting on random sets with ties") {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<double> vals(n);
    for (auto& v : vals) v = 0.25 * static_cast<double>(1 + rng() % 12);  // many ties
    EmpiricalCdf cdf{SampleSet(vals)};
    for (int q = 0; q < 20; ++q) {
      const double x = 0.125 * static_cast<double>(rng() % 30);
      CHECK(cdf(x) == oracles::counting_ecdf(vals, x));
    }
  }
}

TEST_CASE("conditional failure probability") {
  const CdfFn uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(conditional_failure(uniform, 0.5, 0.0) == 0.0);
  CHECK(conditional_failure(uniform, 0.5, 0.25) == doctest::Approx(0.5));

  const CdfFn expo = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  for (double t : {0.0, 0.3, 2.0, 7.0}) {
    CHECK(conditional_failure(expo, t, 0.9) == doctest::Approx(-std::expm1(-0.9)).epsilon(1e-12));
  }

  const CdfFn saturated = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };
  CHECK_THROWS_AS(conditional_failure(saturated, 0.5, 0.1), NumericalError);
}

TEST_CASE("conditional failure is a valid cdf in tau") {
  const CdfFn weib = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / 0.4, 1.3)); };
  for (double t : {0.0, 0.2, 1.0}) {
    double prev = 0.0;
    CHECK(conditional_failure(weib, t, 0.0) == 0.0);
    for (double tau = 0.01; tau < 5.0; tau *= 1.4) {
      const double v = conditional_failure(weib, t, tau);
      CHECK(v >= prev);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

TEST_CASE("tau* solver on closed-form distributions") {
  const CdfFn expo = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  for (double t : {0.0, 1.0, 4.2}) {
    const auto r = solve_tau_star(expo, t, 0.1, 1e6);
    CHECK_FALSE(r.saturated);
    CHECK(r.tau == doctest::Approx(-std::log(0.9)).epsilon(1e-7));
  }

  const CdfFn uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const auto u = solve_tau_star(uniform, 0.0, 0.5, 1e6);
  CHECK(u.tau == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("generic solver agrees with the weibull closed form") {
  // tau* for Weibull(1, 2) at t=1, eps=0.1 is (1 - ln 0.9)^(1/2) - 1.
  const CdfFn weib = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x * x); };
  const double expected = std::sqrt(1.0 - std::log(0.9)) - 1.0;
  const auto r = solve_tau_star(weib, 1.0, 0.1, 1e6);
  CHECK(r.tau == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("tau* round trip: the solution sits exactly on the outage budget") {
  const CdfFn weib = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / 2.0, 0.8)); };
  for (double eps : {0.01, 0.2, 0.7}) {
    for (double t : {0.0, 0.5, 3.0}) {
      const auto r = solve_tau_star(weib, t, eps, 1e9);
      REQUIRE_FALSE(r.saturated);
      CHECK(conditional_failure(weib, t, r.tau) == doctest::Approx(eps).epsilon(1e-6));
      CHECK(conditional_failure(weib, t, r.tau + 1e-5) > eps);
    }
  }
}

TEST_CASE("tau* saturates at the horizon when the cdf cannot reach the target") {
  // Defective distribution: 30% of the mass never fails.
  const CdfFn capped = [](double x) { return x <= 0.0 ? 0.0 : 0.7 * -std::expm1(-x); };
  const auto r = solve_tau_star(capped, 0.0, 0.9, 50.0);
  CHECK(r.saturated);
  CHECK(r.tau == 50.0);
}

TEST_CASE("empirical tau* is the exact step-inversion point") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> vals(20 + rng() % 40);
    for (auto& v : vals) v = 0.05 * static_cast<double>(1 + rng() % 100);
    EmpiricalCdf cdf{SampleSet(vals)};
    const double t = 0.05 * static_cast<double>(rng() % 20);
    if (cdf(t) >= 1.0) continue;
    const double eps = 0.05 + 0.9 * static_cast<double>(rng() % 100) / 100.0;
    const auto r = solve_tau_star(cdf, t, eps);
    if (r.saturated) continue;
    const double target = eps + (1.0 - eps) * cdf(t);
    CHECK(cdf(t + r.tau - 1e-9) <= target);
    CHECK(cdf(t + r.tau + 1e-9) > target);
  }
}

TEST_CASE("reliability target validation") {
  CHECK_NOTHROW(ReliabilityTarget(0.1, 0.95));
  CHECK_THROWS_AS(ReliabilityTarget(0.0, 0.95), ConfigError);
  CHECK_THROWS_AS(ReliabilityTarget(0.1, 1.0), ConfigError);
}

TEST_CASE("failure curve clamps to [0,1]") {
  FailureCurve curve([](double tau) { return tau - 0.5; });
  CHECK(curve(0.0) == 0.0);
  CHECK(curve(0.75) == doctest::Approx(0.25));
  CHECK(curve(10.0) == 1.0);
}
