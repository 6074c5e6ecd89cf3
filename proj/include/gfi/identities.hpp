#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gfi/transport.hpp"

namespace gfi {

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs|
  std::vector<std::pair<std::string, double>> terms;

  double term(const std::string& name) const;
};

// Ent f = Ent g + W2^2/2 + int u' g' dgamma + int (u'' - log(1 + u'')) g dgamma,
// where x + u'(x) is the monotone map from g * gamma to f * gamma.
IdentityReport ent_iden(const RelativeDensity& g, const RelativeDensity& f,
                        std::size_t nodes = kDefaultNodes);

// I(g) = 2 Ent g + 2 int Delta(phi'') g dgamma + int phi''^2 g dgamma
//        + int phi'''^2 / (1 + phi'')^2 g dgamma
// for the map x + phi'(x) from g * gamma to gamma.
IdentityReport bochner_identity(const RelativeDensity& g, std::size_t nodes = kDefaultNodes);

// int |g'/g - x|^2 g dgamma = int (1 + phi'')^2 g dgamma
//                             + int phi'''^2 / (1 + phi'')^2 g dgamma.
IdentityReport cross_identity(const RelativeDensity& g, std::size_t nodes = kDefaultNodes);

}  // namespace gfi
