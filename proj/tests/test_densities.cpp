#include <doctest.h>

#include <cmath>
#include <random>

#include "gfi/densities.hpp"

using namespace gfi;

namespace {

void check_invariants(const RelativeDensity& g) {
  INFO(g.label());
  CHECK(std::abs(g.expect([](double) { return 1.0; }) - 1.0) < 1e-9);
  std::mt19937 rng(11);
  const Interval s = g.support();
  std::uniform_real_distribution<double> u(std::max(s.lo, -6.0) + 0.01, std::min(s.hi, 6.0) - 0.01);
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng), h = 1e-5;
    const double fd = (g.log_g(x + h) - g.log_g(x - h)) / (2 * h);
    CHECK(std::abs(fd - g.dlog_g(x)) < 1e-5 * std::max(1.0, std::abs(fd)));
    if (g.has_d2log()) {
      const double fd2 = (g.dlog_g(x + h) - g.dlog_g(x - h)) / (2 * h);
      CHECK(std::abs(fd2 - g.d2log_g(x)) < 1e-5 * std::max(1.0, std::abs(fd2)));
    }
  }
}

}  // namespace

TEST_CASE("scaled_gaussian closed forms") {
  const auto one = scaled_gaussian(1.0);
  for (double x : {-5.0, -1.0, 0.0, 2.5, 7.0}) CHECK(one.log_g(x) == 0.0);
  const auto wide = scaled_gaussian(0.25);
  CHECK(wide.expect([](double x) { return x * x; }) == doctest::Approx(4.0).epsilon(1e-12));
  const auto narrow = scaled_gaussian(4.0);
  CHECK(*narrow.metadata().sup_g == doctest::Approx(2.0));
  CHECK(narrow.g(0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(*narrow.metadata().poincare == doctest::Approx(0.25));
  CHECK(*narrow.metadata().log_sobolev == doctest::Approx(0.5));
  CHECK_FALSE(wide.metadata().sup_g.has_value());
  CHECK_THROWS_AS(scaled_gaussian(0.0), DomainError);
  CHECK_THROWS_AS(scaled_gaussian(-1.0), DomainError);
}

TEST_CASE("every corpus density is normalized with consistent scores") {
  for (const auto& entry : standard_corpus()) check_invariants(entry.density);
  check_invariants(gaussian(0.7, 1.3));
  check_invariants(quartic(0.2, 0.4));
}

TEST_CASE("gaussian_mixture examples") {
  const double w1[] = {1.0}, m1[] = {0.0}, s1[] = {1.0};
  const auto single = gaussian_mixture(w1, m1, s1);
  for (double x : {-3.0, 0.0, 4.0}) CHECK(single.log_g(x) == 0.0);

  const double w[] = {0.5, 0.5}, m[] = {-1.0, 1.0}, s[] = {1.0, 1.0};
  const auto sym = gaussian_mixture(w, m, s);
  CHECK(std::abs(sym.expect([](double x) { return x; })) < 1e-10);

  const double s8[] = {0.8, 0.8};
  const auto mix = gaussian_mixture(w, m, s8);
  auto fisher = [&](std::size_t n) {
    return mix.expect([&](double x) { return mix.dlog_g(x) * mix.dlog_g(x); }, n);
  };
  const double i1 = fisher(kDefaultNodes), i2 = fisher(2 * kDefaultNodes - 1);
  CHECK(std::isfinite(i1));
  CHECK(std::abs(i1 - i2) < 1e-8);
  CHECK(mix.metadata().sup_g.has_value());

  const double tiny[] = {0.8, 1e-3};
  CHECK_THROWS_AS(gaussian_mixture(w, m, tiny), DomainError);
  const double bad_w[] = {0.5, 0.6};
  CHECK_THROWS_AS(gaussian_mixture(bad_w, m, s8), DomainError);
}

TEST_CASE("mixture sup_g agrees with a brute-force scan") {
  const double w[] = {0.3, 0.7}, m[] = {-1.4, 0.6}, s[] = {0.7, 0.9};
  const auto mix = gaussian_mixture(w, m, s);
  double best = 0.0;
  for (double x = -10; x <= 10; x += 1e-4) best = std::max(best, mix.g(x));
  CHECK(*mix.metadata().sup_g == doctest::Approx(best).epsilon(1e-8));
}

TEST_CASE("recenter translates the measure") {
  const double w[] = {0.5, 0.5}, m[] = {-1.0, 1.0}, s[] = {0.8, 0.8};
  const auto sym = gaussian_mixture(w, m, s);
  const auto same = recenter(sym);
  for (double x : {-2.0, 0.0, 1.5}) CHECK(std::abs(same.log_g(x) - sym.log_g(x)) < 1e-12);

  const auto shifted = recenter(gaussian(1.3, 0.7));
  const auto ref = gaussian(0.0, 0.7);
  for (double x : {-3.0, -0.5, 0.0, 2.0}) {
    CHECK(shifted.log_g(x) == doctest::Approx(ref.log_g(x)).epsilon(1e-12));
    CHECK(shifted.dlog_g(x) == doctest::Approx(ref.dlog_g(x)).epsilon(1e-12));
    CHECK(shifted.cdf(x) == doctest::Approx(ref.cdf(x)).epsilon(1e-12));
  }
  CHECK(std::abs(shifted.expect([](double x) { return x; })) < 1e-9);

  const auto one = recenter(scaled_gaussian(1.0));
  CHECK(one.log_g(1.0) == 0.0);

  const auto tilted = recenter(logcosh(1.5, 1.0, 0.5));
  CHECK(std::abs(tilted.expect([](double x) { return x; })) < 1e-9);
  const auto twice = recenter(tilted);
  for (double x : {-1.0, 0.3, 2.0}) CHECK(std::abs(twice.log_g(x) - tilted.log_g(x)) < 1e-10);
}

TEST_CASE("cdf and quantile examples") {
  CHECK(scaled_gaussian(1.0).cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  const auto wide = scaled_gaussian(0.25);
  CHECK(std::abs(wide.quantile(0.5)) < 1e-14);
  CHECK(wide.cdf(2.0) == doctest::Approx(0.841344746068543).epsilon(1e-13));
  CHECK_THROWS_AS(wide.quantile(0.0), DomainError);
  CHECK_THROWS_AS(wide.quantile(1.0), DomainError);
}

TEST_CASE("quantile and cdf are mutually inverse on the corpus") {
  for (const auto& entry : standard_corpus()) {
    const auto& g = entry.density;
    INFO(g.label());
    for (double x = -6.0; x <= 6.0; x += 0.25) {
      const double p = g.cdf(x);
      // Log-space round trip covers the far tails.
      const double back = x < 0 ? g.quantile_log(g.log_cdf(x), Tail::lower)
                                 : g.quantile_log(g.log_sf(x), Tail::upper);
      CHECK(std::abs(back - x) < 1e-7);
      if (p > 1e-12 && p < 1.0 - 1e-8) CHECK_MESSAGE(std::abs(g.quantile(p) - x) < 1e-7, "x=" << x);
    }
    for (double p = 0.001; p <= 0.999; p += 0.0125) CHECK(std::abs(g.cdf(g.quantile(p)) - p) < 1e-6);
  }
}

TEST_CASE("tabulated CDF matches the closed form deep in the tails") {
  const double s = 0.6;
  UnnormalizedLogDensity f{[s](double x) { return -0.5 * x * x / (s * s); },
                           [s](double x) { return -x / (s * s); },
                           [s](double) { return -1.0 / (s * s); }};
  const auto tab = tabulated_density(f, effective_support(f.log_rho, 0.0), false, {}, "tab");
  const auto ref = gaussian(0.0, s);
  for (double x = -7.0; x <= 7.0; x += 0.37) {
    CHECK(tab.log_cdf(x) == doctest::Approx(ref.log_cdf(x)).epsilon(1e-9));
    CHECK(tab.log_sf(x) == doctest::Approx(ref.log_sf(x)).epsilon(1e-9));
    CHECK(tab.log_g(x) == doctest::Approx(ref.log_g(x)).epsilon(1e-12).scale(1.0));
  }
  for (double lp : {-69.0, -30.0, -5.0}) {
    CHECK(tab.quantile_log(lp, Tail::lower) == doctest::Approx(ref.quantile_log(lp, Tail::lower)).epsilon(1e-9));
    CHECK(tab.quantile_log(lp, Tail::upper) == doctest::Approx(ref.quantile_log(lp, Tail::upper)).epsilon(1e-9));
  }
}

TEST_CASE("deep Gaussian quantiles") {
  const auto g = scaled_gaussian(1.0);
  const double y = g.quantile_log(std::log(1e-30), Tail::lower);
  CHECK(y == doctest::Approx(-11.4640246884436).epsilon(1e-9));
  CHECK(g.quantile_log(std::log(1e-30), Tail::upper) == doctest::Approx(-y).epsilon(1e-12));
  CHECK(g.quantile_log(std::log(1e-30), Tail::lower, -11.0) == doctest::Approx(y).epsilon(1e-13));
}

TEST_CASE("compact support refuses to extrapolate") {
  const auto u = uniform(-1.0, 2.0);
  CHECK(u.cdf(0.5) == doctest::Approx(0.5));
  CHECK(u.quantile(0.25) == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK_THROWS_AS(u.log_g(2.5), DomainError);
  CHECK(std::abs(u.expect([](double) { return 1.0; }) - 1.0) < 1e-12);

  Grid1D grid(-12, 12, 1201);
  std::vector<double> lg;
  for (double x : grid.nodes()) lg.push_back(-std::log(2.0) + 0.375 * x * x);
  const auto gd = grid_density(grid, lg);
  CHECK_FALSE(gd.has_d2log());
  CHECK_THROWS_AS(gd.log_g(12.5), DomainError);
  CHECK(std::abs(gd.expect([](double) { return 1.0; }) - 1.0) < 1e-9);
  CHECK(gd.expect([](double x) { return x * x; }) == doctest::Approx(4.0).epsilon(1e-6));
  const auto ref = scaled_gaussian(0.25);
  for (double x : {-3.0, 0.1, 2.2}) {
    CHECK(gd.log_g(x) == doctest::Approx(ref.log_g(x)).epsilon(1e-6).scale(1.0));
    CHECK(gd.cdf(x) == doctest::Approx(ref.cdf(x)).epsilon(1e-7));
  }
}
