#pragma once

#include <optional>
#include <span>
#include <string>

#include "gfi/densities.hpp"

namespace gfi {

enum class Provenance { exact_metadata, spectral_gap_numeric, not_computed };
const char* to_string(Provenance p);

struct ConstantEstimate {
  double value = 0.0;
  Provenance provenance = Provenance::not_computed;
  bool coarse = false;  // spectral estimate moved by more than 1e-4 under refinement

  bool available() const { return provenance != Provenance::not_computed; }
};

// Functionals of a relative density g with respect to the standard Gaussian.
struct FunctionalValues {
  double ent = 0.0;
  double fisher = 0.0;
  double cross = 0.0;  // int |g'/g - x|^2 g dgamma
  ConstantEstimate cp;
  ConstantEstimate clsi;
  int dimension = 1;
};

double entropy(const RelativeDensity& g, std::size_t nodes = kDefaultNodes);
double fisher_information(const RelativeDensity& g, std::size_t nodes = kDefaultNodes);
double cross_term(const RelativeDensity& g, std::size_t nodes = kDefaultNodes);

// Poincare constant of g * gamma: metadata when known exactly, otherwise the
// inverse spectral gap of the weight x^2/2 - log g (Richardson-extrapolated).
ConstantEstimate poincare_constant(const RelativeDensity& g, std::size_t nodes = kDefaultNodes);
// Log-Sobolev constant in the convention Ent_mu(f^2) <= C int f'^2 dmu (so 2
// for gamma); only available from metadata.
ConstantEstimate log_sobolev_constant(const RelativeDensity& g);

FunctionalValues functionals(const RelativeDensity& g, std::size_t nodes = kDefaultNodes);
// Product density g_1(x_1) ... g_n(x_n): Ent, I and the cross term add up;
// C_P and C_LSI are the maxima over the factors.
FunctionalValues functionals(std::span<const RelativeDensity> factors,
                             std::size_t nodes = kDefaultNodes);

// 2 int |f'| dgamma - int |f - E f| dgamma for the standard Gaussian.
double cheeger_check(const Evaluator& f, const Evaluator& df);

// Brascamp-Lieb margin int f'^2 / V'' dmu - Var_mu f for mu = e^{-V} with
// V'' = 1 - (log g_mu)''. Empty when mu is not strictly log-concave on its
// effective support.
std::optional<double> brascamp_lieb_check(const RelativeDensity& mu, const Evaluator& f,
                                          const Evaluator& df,
                                          std::size_t nodes = kDefaultNodes);

}  // namespace gfi
