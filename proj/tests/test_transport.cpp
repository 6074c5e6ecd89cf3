#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gfi/transport.hpp"

using namespace gfi;

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / M_PI);

void check_plan(const TransportPlan1D& plan) {
  INFO(plan.source().label() << " -> " << plan.target().label());
  CHECK(plan.pushforward_residual() <= 1e-7);
  const Grid1D test(-6.0, 6.0, 1000);
  double prev = -kInf;
  for (double x : test.nodes()) {
    const double y = plan.T(x);
    CHECK(y > prev);
    CHECK(plan.Tprime(x) > 0.0);
    CHECK(std::abs(plan.S(y) - x) < 1e-6);
    prev = y;
  }
}

std::vector<std::pair<RelativeDensity, RelativeDensity>> corpus_pairs() {
  const auto corpus = standard_corpus();
  std::vector<std::pair<RelativeDensity, RelativeDensity>> out;
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  while (out.size() < 10) {
    const std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    out.emplace_back(corpus[i].density, corpus[j].density);
  }
  return out;
}

void check_marginals(const DiscretePlan& p) {
  const std::size_t m = p.source.atoms.size(), n = p.target.atoms.size();
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(p.at(i, j) >= 0.0);
      row += p.at(i, j);
    }
    CHECK(std::abs(row - p.source.weights[i]) < 1e-9);
  }
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < m; ++i) col += p.at(i, j);
    CHECK(std::abs(col - p.target.weights[j]) < 1e-9);
  }
}

void check_certificate(const DiscretePlan& p, const CostFunction& c) {
  const std::size_t m = p.source.atoms.size(), n = p.target.atoms.size();
  double dual = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) dual += p.source.weights[i] * p.u[i];
  for (std::size_t j = 0; j < n; ++j) dual += p.target.weights[j] * p.v[j];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double cij = c(p.source.atoms[i], p.target.atoms[j]);
      scale = std::max(scale, std::abs(cij));
      CHECK(p.u[i] + p.v[j] <= cij + 1e-9 * scale);
    }
  CHECK(std::abs(dual - p.cost) <= 1e-9 * scale);
}

}  // namespace

TEST_CASE("identity plan") {
  const auto g = standard_corpus()[5].density;
  const auto plan = monotone_map(g, g);
  for (double x : {-2.0, 0.0, 1.3}) {
    CHECK(std::abs(plan.T(x) - x) < 1e-9);
    CHECK(std::abs(plan.phi_prime(x)) < 1e-9);
  }
  CHECK(plan.cost_w2() < 1e-15);
  CHECK(duality_residual(plan) < 1e-12);
}

TEST_CASE("Gaussian maps are linear") {
  const auto gamma = scaled_gaussian(1.0), wide = scaled_gaussian(0.25);
  const auto down = monotone_map(wide, gamma);
  for (double x : {-5.0, -1.0, 0.5, 3.0}) {
    CHECK(down.T(x) == doctest::Approx(x / 2).epsilon(1e-10));
    CHECK(down.Tprime(x) == doctest::Approx(0.5).epsilon(1e-10));
  }
  CHECK(down.cost_w2() == doctest::Approx(1.0).epsilon(1e-10));

  const auto up = monotone_map(gamma, wide);
  for (double x : {-4.0, -0.3, 0.0, 2.0}) {
    CHECK(up.T(x) == doctest::Approx(2 * x).epsilon(1e-10).scale(1.0));
    CHECK(up.phi_prime(x) == doctest::Approx(x).epsilon(1e-10).scale(1.0));
    CHECK(up.Tprime(x) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(up.Tsecond(x)) < 1e-9);
    CHECK(up.phi(x) == doctest::Approx(0.5 * x * x).epsilon(1e-10).scale(1.0));
    CHECK(up.psi(2 * x) == doctest::Approx(-x * x).epsilon(1e-10).scale(1.0));
  }
  CHECK(up.cost_w2() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(duality_residual(up) <= 1e-7);
  CHECK(duality_residual(down) <= 1e-7);
  check_plan(up);
  check_plan(down);
}

TEST_CASE("Tsecond agrees with differencing Tprime") {
  const auto gamma = scaled_gaussian(1.0);
  for (const auto& e : standard_corpus()) {
    const auto plan = monotone_map(gamma, e.density);
    for (double x : {-2.5, -0.4, 0.9, 2.0}) {
      const double h = 1e-4;
      const double fd = (plan.Tprime(x + h) - plan.Tprime(x - h)) / (2 * h);
      CHECK(plan.Tsecond(x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("W2 and W1 closed forms") {
  const auto gamma = scaled_gaussian(1.0);
  for (double s : {0.5, 2.0, 3.0})
    CHECK(w2(gamma, gaussian(0.0, s)) == doctest::Approx(std::abs(s - 1)).epsilon(1e-10));
  CHECK(w1(gamma, scaled_gaussian(0.25)) == doctest::Approx(kSqrt2OverPi).epsilon(1e-9));
  CHECK(w2(gamma, gamma) < 1e-12);
  for (const auto& [mu, nu] : corpus_pairs()) {
    CHECK(std::abs(w2_squared(mu, nu) - w2_squared(nu, mu)) < 1e-8);
    CHECK(std::abs(w1(mu, nu) - w1(nu, mu)) < 1e-8);
  }
}

TEST_CASE("W11 is additive over coordinates") {
  const auto gamma = scaled_gaussian(1.0), wide = scaled_gaussian(0.25);
  const auto p = monotone_map(gamma, wide), id = monotone_map(gamma, gamma);
  const std::vector<TransportPlan1D> one{p}, two{p, p}, mixed{p, id};
  CHECK(w11_product(one) == doctest::Approx(w1(p)).epsilon(1e-14));
  CHECK(w11_product(two) == doctest::Approx(2 * kSqrt2OverPi).epsilon(1e-9));
  CHECK(w11_product(mixed) == doctest::Approx(kSqrt2OverPi).epsilon(1e-9));
  CHECK(w2_squared_product(two) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(w11_product(std::span<const TransportPlan1D>{}), DomainError);
}

TEST_CASE("plans on the corpus satisfy the map invariants") {
  const auto gamma = scaled_gaussian(1.0);
  for (const auto& e : standard_corpus()) {
    check_plan(monotone_map(gamma, e.density));
    check_plan(monotone_map(e.density, gamma));
  }
  for (const auto& [mu, nu] : corpus_pairs()) check_plan(monotone_map(mu, nu, {.potentials = false}));
}

TEST_CASE("duality identity holds for mixtures") {
  const auto gamma = scaled_gaussian(1.0);
  for (const auto& e : standard_corpus()) {
    INFO(e.id);
    const auto plan = monotone_map(e.density, gamma);
    CHECK(duality_residual(plan) <= 1e-5);
    CHECK(plan.phi(0.0) == 0.0);
    const double f0 = plan.phi_prime(0.0);
    CHECK(std::abs(plan.psi(plan.T(0.0)) + 0.5 * f0 * f0) < 1e-12);
  }
  const auto shifted = gaussian(7.0, 0.5);
  CHECK(duality_residual(monotone_map(shifted, gamma)) <= 1e-6);
}

TEST_CASE("lp_transport matches brute force on small assignment problems") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5;
    DiscreteMeasure a, b;
    for (int i = 0; i < n; ++i) {
      a.atoms.push_back(u(rng));
      b.atoms.push_back(u(rng));
    }
    a.weights.assign(n, 1.0 / n);
    b.weights.assign(n, 1.0 / n);
    // Non-convex, non-symmetric cost.
    CostFunction c = [](double x, double y) { return std::sin(3 * x * y) + std::abs(x - y + 0.2); };
    const auto plan = lp_transport(a, b, c);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInf;
    do {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += c(a.atoms[i], b.atoms[perm[i]]) / n;
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(plan.cost == doctest::Approx(best).epsilon(1e-12));
    check_marginals(plan);
    check_certificate(plan, c);
  }
}

TEST_CASE("lp_transport with unequal weights carries a dual certificate") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    DiscreteMeasure a, b;
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < 17; ++i) {
      a.atoms.push_back(4 * u(rng) - 2);
      a.weights.push_back(u(rng) + 0.01);
      sa += a.weights.back();
    }
    for (int j = 0; j < 23; ++j) {
      b.atoms.push_back(4 * u(rng) - 2);
      b.weights.push_back(u(rng) + 0.01);
      sb += b.weights.back();
    }
    for (double& w : a.weights) w /= sa;
    for (double& w : b.weights) w /= sb;
    CostFunction c = [](double x, double y) { return ka_cost_function(0.8, x - y); };
    const auto plan = lp_transport(a, b, c);
    check_marginals(plan);
    check_certificate(plan, c);
  }
}

TEST_CASE("lp_transport edge cases") {
  const auto atoms = quantile_atoms(scaled_gaussian(1.0), 64);
  const auto plan = lp_transport(atoms, atoms, [](double x, double y) { return (x - y) * (x - y); });
  CHECK(plan.cost == 0.0);
  for (std::size_t i = 0; i < 64; ++i) CHECK(plan.at(i, i) == doctest::Approx(1.0 / 64));

  DiscreteMeasure heavy = atoms;
  heavy.weights[0] += 1e-6;
  CHECK_THROWS_AS(lp_transport(atoms, heavy, [](double, double) { return 0.0; }), DomainError);
  CHECK_THROWS_AS(lp_transport(atoms, atoms, [](double, double) { return kInf; }), DomainError);
}

TEST_CASE("lp_transport converges to the monotone-map costs") {
  const auto sq = [](double x, double y) { return (x - y) * (x - y); };
  const auto ab = [](double x, double y) { return std::abs(x - y); };
  for (const auto& [mu, nu] : corpus_pairs()) {
    INFO(mu.label() << " -> " << nu.label());
    const double w2sq = w2_squared(mu, nu), w1v = w1(mu, nu);
    double prev_sq = kInf, prev_ab = kInf;
    for (std::size_t n : {256u, 512u}) {
      const auto a = quantile_atoms(mu, n), b = quantile_atoms(nu, n);
      const double e_sq = std::abs(lp_transport(a, b, sq).cost - w2sq);
      const double e_ab = std::abs(lp_transport(a, b, ab).cost - w1v);
      const double tol = n == 256 ? 3e-2 : 1.5e-2;
      CHECK(e_sq <= tol);
      CHECK(e_ab <= tol);
      // Errors far below tolerance need not shrink monotonically.
      CHECK(e_sq <= std::max(prev_sq, 1e-3));
      CHECK(e_ab <= std::max(prev_ab, 1e-3));
      prev_sq = e_sq;
      prev_ab = e_ab;
    }
  }
}

TEST_CASE("K_a examples") {
  const auto gamma = scaled_gaussian(1.0);
  const auto zero = k_a_cost(gamma);
  CHECK(zero.value == 0.0);
  CHECK(zero.degenerate);

  const auto shifted = k_a_cost(gaussian(0.7, 1.0));
  CHECK(shifted.a == doctest::Approx(0.7).epsilon(1e-9));
  CHECK_FALSE(shifted.degenerate);
  CHECK(shifted.value >= 0.0);
  CHECK(shifted.value < 1e-6);

  const auto wide = k_a_cost(scaled_gaussian(0.25));
  CHECK(wide.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(wide.value >= 0.0);
  CHECK(wide.value <= 8 * 0.31815);

  CHECK(ka_cost_function(0.9, 0.9) == doctest::Approx(0.0).scale(1.0));
  CHECK(ka_cost_function(2.0, 0.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(ka_cost_function(0.0, 1.0), DomainError);
}
