#include <doctest.h>

#include <cmath>

#include "gfi/functionals.hpp"
#include "gfi/transport.hpp"

using namespace gfi;

TEST_CASE("Gaussian closed forms") {
  const auto one = scaled_gaussian(1.0), wide = scaled_gaussian(0.25), narrow = scaled_gaussian(4.0);
  CHECK(entropy(one) == 0.0);
  CHECK(fisher_information(one) == 0.0);
  CHECK(cross_term(one) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(entropy(wide) == doctest::Approx(1.5 - std::log(2.0)).epsilon(1e-12));
  CHECK(entropy(narrow) == doctest::Approx(-0.375 + std::log(2.0)).epsilon(1e-12));
  CHECK(fisher_information(wide) == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(fisher_information(narrow) == doctest::Approx(2.25).epsilon(1e-12));
  CHECK(cross_term(wide) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(cross_term(narrow) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("Poincare constants") {
  CHECK(poincare_constant(scaled_gaussian(1.0)).value == 1.0);
  const auto four = poincare_constant(scaled_gaussian(0.25));
  CHECK(four.value == doctest::Approx(4.0));
  CHECK(four.provenance == Provenance::exact_metadata);

  // The same Gaussians without metadata go through the spectral solver.
  for (double s : {0.5, 1.0, 2.0}) {
    UnnormalizedLogDensity f{[s](double x) { return -0.5 * x * x / (s * s); },
                             [s](double x) { return -x / (s * s); }, {}};
    const auto g = tabulated_density(f, effective_support(f.log_rho, 0.0), false, {}, "tab");
    const auto cp = poincare_constant(g);
    CHECK(cp.provenance == Provenance::spectral_gap_numeric);
    CHECK(cp.value == doctest::Approx(s * s).epsilon(1e-3));
  }

  const auto mix = standard_corpus()[5].density;  // mixture_sym_0.8
  const auto a = poincare_constant(mix, 2001), b = poincare_constant(mix, 4001);
  CHECK(a.provenance == Provenance::spectral_gap_numeric);
  CHECK(std::abs(a.value - b.value) < 1e-3);
  CHECK(a.value > 1.0);
}

TEST_CASE("log-Sobolev constants come only from metadata") {
  const auto c = log_sobolev_constant(scaled_gaussian(0.25));
  CHECK(c.value == doctest::Approx(8.0));
  CHECK_FALSE(log_sobolev_constant(standard_corpus()[5].density).available());
}

TEST_CASE("LSI, Talagrand and HWI hold on the corpus") {
  const auto gamma = scaled_gaussian(1.0);
  for (const auto& e : standard_corpus()) {
    INFO(e.id);
    const double ent = entropy(e.density), fi = fisher_information(e.density);
    const double w = w2(gamma, e.density);
    CHECK(ent >= -1e-9);
    CHECK(fi >= 0.0);
    CHECK(cross_term(e.density) >= 0.0);
    CHECK(0.5 * fi - ent >= -1e-9);
    CHECK(ent - 0.5 * w * w >= -1e-9);
    CHECK(std::sqrt(fi) * w - 0.5 * w * w - ent >= -1e-9);
  }
}

TEST_CASE("product functionals add up") {
  const std::vector<RelativeDensity> f{scaled_gaussian(4.0), scaled_gaussian(0.25)};
  const auto v = functionals(f);
  CHECK(v.dimension == 2);
  CHECK(v.ent == doctest::Approx(1.5 - 0.375).epsilon(1e-12));
  CHECK(v.fisher == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(v.cross == doctest::Approx(4.25).epsilon(1e-12));
  CHECK(v.cp.value == doctest::Approx(4.0));
  CHECK(v.clsi.value == doctest::Approx(8.0));
}

TEST_CASE("Cheeger inequality for the Gaussian") {
  CHECK(std::abs(cheeger_check([](double) { return 3.0; }, [](double) { return 0.0; })) < 1e-12);
  // 2 E|1| - E|x| = 2 - sqrt(2/pi).
  CHECK(cheeger_check([](double x) { return x; }, [](double) { return 1.0; }) ==
        doctest::Approx(2.0 - std::sqrt(2.0 / M_PI)).epsilon(1e-9));
  CHECK(cheeger_check([](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }) > 0.0);
  CHECK(cheeger_check([](double x) { return std::abs(x); }, [](double x) { return x < 0 ? -1.0 : 1.0; }) >
        0.0);
}

TEST_CASE("Brascamp-Lieb inequality") {
  auto id = [](double x) { return x; };
  auto one = [](double) { return 1.0; };
  CHECK(std::abs(*brascamp_lieb_check(scaled_gaussian(1.0), id, one)) < 1e-9);
  const auto narrow = scaled_gaussian(4.0);
  CHECK(std::abs(*brascamp_lieb_check(narrow, id, one)) < 1e-9);
  CHECK(*brascamp_lieb_check(narrow, [](double x) { return x * x; }, [](double x) { return 2 * x; }) > 0.0);
  const auto quart = standard_corpus()[8].density;
  CHECK(*brascamp_lieb_check(quart, [](double x) { return std::sin(x); },
                             [](double x) { return std::cos(x); }) >= -1e-8);
  // Bimodal mixtures are not log-concave.
  CHECK_FALSE(brascamp_lieb_check(standard_corpus()[5].density, id, one).has_value());
}
