#include <doctest.h>

#include <cmath>
#include <random>

#include "gfi/numerics.hpp"

using namespace gfi;

namespace {

// Probabilists' Hermite polynomial by the three-term recurrence.
double hermite_he(int k, double x) {
  double p0 = 1.0, p1 = x;
  if (k == 0) return p0;
  for (int j = 1; j < k; ++j) {
    const double p2 = x * p1 - j * p0;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double double_factorial(int k) {
  double r = 1.0;
  for (int j = k; j > 1; j -= 2) r *= j;
  return r;
}

}  // namespace

TEST_CASE("Grid1D validates and spaces nodes uniformly") {
  Grid1D g(-8, 8, 5);
  CHECK(g.spacing() == doctest::Approx(4.0));
  CHECK(g[0] == -8.0);
  CHECK(g[4] == 8.0);
  CHECK(g.refined().size() == 9);
  CHECK_THROWS_AS(Grid1D(1, 0, 5), DomainError);
  CHECK_THROWS_AS(Grid1D(0, 1, 2), DomainError);
}

TEST_CASE("gauss_hermite low-order moments") {
  const auto r2 = gauss_hermite(2);
  CHECK(std::abs(integrate_gamma([](double x) { return x * x; }, r2) - 1.0) < 1e-14);
  CHECK(std::abs(r2.weights[0] + r2.weights[1] - 1.0) < 1e-15);
  const auto r10 = gauss_hermite(10);
  CHECK(std::abs(integrate_gamma([](double x) { return x * x * x * x; }, r10) - 3.0) < 1e-12);
  CHECK_THROWS_AS(gauss_hermite(1), DomainError);
  CHECK_THROWS_AS(gauss_hermite(2001), DomainError);
}

TEST_CASE("gauss_hermite is exact on even moments up to degree 2n-1") {
  for (int n : {3, 7, 12, 20}) {
    const auto rule = gauss_hermite(n);
    for (int k = 0; k <= 2 * n - 1; k += 2) {
      const double exact = k == 0 ? 1.0 : double_factorial(k - 1);
      const double got = rule.sum([k](double x) { return std::pow(x, k); });
      CHECK(std::abs(got - exact) <= 1e-12 * exact);
    }
  }
}

TEST_CASE("gauss_hermite integrates Hermite polynomials to their moments") {
  for (int n : {5, 16, 40}) {
    const auto rule = gauss_hermite(n);
    for (int k = 1; k <= std::min(2 * n - 1, 30); ++k) {
      // He_k has zero mean for k >= 1; scale by the L2 norm sqrt(k!).
      const double norm = std::sqrt(std::tgamma(k + 1.0));
      const double got = rule.sum([k](double x) { return hermite_he(k, x); }) / norm;
      CHECK(std::abs(got) < 1e-10);
    }
  }
}

TEST_CASE("gauss_hermite large rules stay normalized") {
  for (int n : {200, 1000, 2000}) {
    const auto rule = gauss_hermite(n);
    double s = 0.0;
    for (double w : rule.weights) s += w;
    CHECK(std::abs(s - 1.0) < 1e-12);
    for (std::size_t i = 1; i < rule.size(); ++i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
  }
}

TEST_CASE("integrate_gamma exponential moments") {
  const auto rule = gauss_hermite(200);
  CHECK(integrate_gamma([](double) { return 1.0; }, rule) == doctest::Approx(1.0).epsilon(1e-14));
  for (double a : {0.28125, 0.375, 0.4375}) {
    const double exact = 1.0 / std::sqrt(1.0 - 2.0 * a);
    const double got = integrate_gamma([a](double x) { return std::exp(a * x * x); }, rule);
    CHECK(std::abs(got - exact) < 1e-9);
  }
  CHECK_THROWS_AS(integrate_gamma([](double x) { return x > 1 ? NAN : 0.0; }, rule), NumericalError);
}

TEST_CASE("Gauss-Legendre and composite rules") {
  const auto gl = gauss_legendre(5);
  CHECK(gl.sum([](double x) { return std::pow(x, 8); }) == doctest::Approx(2.0 / 9).epsilon(1e-14));
  Grid1D g(0, M_PI, 201);
  std::vector<double> v;
  for (double x : g.nodes()) v.push_back(std::sin(x));
  CHECK(simpson(v, g.spacing()) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(trapezoid(v, g.spacing()) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("integrate_abs splits at sign changes") {
  Grid1D cells(-1, 1, 4);
  const double got = integrate_abs([](double x) { return x - 0.1; }, [](double) { return 1.0; }, cells);
  CHECK(got == doctest::Approx(0.5 * 1.1 * 1.1 + 0.5 * 0.9 * 0.9).epsilon(1e-14));
}

TEST_CASE("log_ndtr across the tails") {
  CHECK(log_ndtr(0.0) == doctest::Approx(std::log(0.5)));
  CHECK(std::exp(log_ndtr(1.0)) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  // Both sides of the asymptotic switch.
  CHECK(log_ndtr(-29.999) == doctest::Approx(-454.291211196123828).epsilon(1e-14));
  CHECK(log_ndtr(-30.001) == doctest::Approx(-454.351277715458794).epsilon(1e-14));
  CHECK(log_ndtr(-40.0) == doctest::Approx(-804.608442013754).epsilon(1e-13));
  CHECK(log_ndtr(9.0) == doctest::Approx(-1.1285884059538408e-19).epsilon(1e-10));
}

TEST_CASE("legendre_transform of the quadratic is self-dual") {
  Grid1D xg(-8, 8, 1601), yg(-4, 4, 801);
  std::vector<double> f;
  for (double x : xg.nodes()) f.push_back(0.5 * x * x);
  const auto fs = legendre_transform(xg, f, yg);
  const double h = xg.spacing();
  for (std::size_t j = 0; j < yg.size(); ++j) {
    const double y = yg[j];
    CHECK(std::abs(fs[j] - 0.5 * y * y) <= h * h);
  }
}

TEST_CASE("legendre_transform of |x| is the indicator of [-1, 1]") {
  Grid1D xg(-8, 8, 161), yg(-2, 2, 41);
  std::vector<double> f;
  for (double x : xg.nodes()) f.push_back(std::abs(x));
  const auto fs = legendre_transform(xg, f, yg);
  for (std::size_t j = 0; j < yg.size(); ++j) {
    if (std::abs(yg[j]) <= 1.0 + 1e-12) CHECK(std::abs(fs[j]) < 1e-12);
    else CHECK(fs[j] == kInf);
  }
  CHECK_THROWS_AS(legendre_transform(xg, std::vector<double>(161, kInf), yg), DomainError);
}

TEST_CASE("legendre_transform biconjugation and order reversal") {
  Grid1D xg(-3, 3, 301), yg(-30, 30, 6001);
  std::vector<double> f, g;
  for (double x : xg.nodes()) {
    f.push_back(std::cosh(x) + 0.3 * x);
    g.push_back(std::cosh(x) + 0.3 * x + 0.2 + 0.1 * std::sin(3 * x));
  }
  const auto fs = legendre_transform(xg, f, yg);
  const auto fss = legendre_transform(yg.nodes(), fs, xg.nodes());
  for (std::size_t i = 1; i + 1 < xg.size(); ++i) CHECK(std::abs(fss[i] - f[i]) < 1e-10);

  const auto gs = legendre_transform(xg, g, yg, LegendreExtension::grid_only);
  const auto fs_grid = legendre_transform(xg, f, yg, LegendreExtension::grid_only);
  for (std::size_t j = 0; j < yg.size(); ++j) CHECK(fs_grid[j] >= gs[j]);
}

TEST_CASE("legendre_transform matches brute force on random data") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x, f, y;
  for (int i = 0; i < 60; ++i) {
    x.push_back(-3 + 0.1 * i);
    f.push_back(u(rng) + 0.5 * x.back() * x.back());
  }
  for (int j = 0; j < 80; ++j) y.push_back(-5 + 0.125 * j);
  const auto fs = legendre_transform(x, f, y, LegendreExtension::grid_only);
  for (std::size_t j = 0; j < y.size(); ++j) {
    double best = -kInf;
    for (std::size_t i = 0; i < x.size(); ++i) best = std::max(best, x[i] * y[j] - f[i]);
    CHECK(fs[j] == doctest::Approx(best).epsilon(1e-13));
  }
}

TEST_CASE("spectral_gap of Gaussian weights") {
  auto gauss = [](double s) { return [s](double x) { return -0.5 * x * x / (s * s); }; };
  const auto g1 = spectral_gap(gauss(1.0), Grid1D(-12, 12, 2001));
  CHECK(std::abs(1.0 / g1.lambda1 - 1.0) < 1e-3);
  CHECK_FALSE(g1.coarse);
  const auto g2 = spectral_gap(gauss(2.0), Grid1D(-24, 24, 2001));
  CHECK(std::abs(1.0 / g2.lambda1 - 4.0) < 1e-3);
  const auto gh = spectral_gap(gauss(0.5), Grid1D(-6, 6, 2001));
  CHECK(std::abs(1.0 / gh.lambda1 - 0.25) < 1e-3);
}

TEST_CASE("spectral_gap converges at second order") {
  auto w = [](double x) { return -0.5 * x * x; };
  const double e1 = std::abs(detail::second_neumann_eigenvalue(w, Grid1D(-10, 10, 101)) - 1.0);
  const double e2 = std::abs(detail::second_neumann_eigenvalue(w, Grid1D(-10, 10, 201)) - 1.0);
  const double e3 = std::abs(detail::second_neumann_eigenvalue(w, Grid1D(-10, 10, 401)) - 1.0);
  CHECK(std::log2(e1 / e2) >= 1.8);
  CHECK(std::log2(e2 / e3) >= 1.8);
}

TEST_CASE("spectral_gap flags a coarse grid") {
  const auto g = spectral_gap([](double x) { return -0.5 * x * x; }, Grid1D(-10, 10, 31));
  CHECK(g.coarse);
}
