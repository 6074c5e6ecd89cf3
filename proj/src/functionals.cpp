#include "gfi/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace gfi {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::exact_metadata: return "exact-metadata";
    case Provenance::spectral_gap_numeric: return "spectral-gap-numeric";
    case Provenance::not_computed: return "not-computed";
  }
  return "unknown";
}

double entropy(const RelativeDensity& g, std::size_t nodes) {
  const double ent = g.expect([&](double x) { return g.log_g(x); }, nodes);
  if (ent < -1e-9) throw NumericalError(g.label() + ": negative relative entropy, g is not normalized");
  return ent;
}

double fisher_information(const RelativeDensity& g, std::size_t nodes) {
  return g.expect(
      [&](double x) {
        const double s = g.dlog_g(x);
        return s * s;
      },
      nodes);
}

double cross_term(const RelativeDensity& g, std::size_t nodes) {
  return g.expect(
      [&](double x) {
        const double s = g.dlog_g(x) - x;
        return s * s;
      },
      nodes);
}

ConstantEstimate poincare_constant(const RelativeDensity& g, std::size_t nodes) {
  if (g.metadata().poincare) return {*g.metadata().poincare, Provenance::exact_metadata, false};
  const SpectralGap gap = spectral_gap([&](double x) { return g.log_rho(x); }, g.grid(nodes));
  const double lambda = gap.extrapolated();
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw NumericalError(g.label() + ": spectral gap estimate is not positive");
  return {1.0 / lambda, Provenance::spectral_gap_numeric, gap.coarse};
}

ConstantEstimate log_sobolev_constant(const RelativeDensity& g) {
  if (g.metadata().log_sobolev) return {*g.metadata().log_sobolev, Provenance::exact_metadata, false};
  return {};
}

FunctionalValues functionals(const RelativeDensity& g, std::size_t nodes) {
  FunctionalValues v;
  v.ent = entropy(g, nodes);
  v.fisher = fisher_information(g, nodes);
  v.cross = cross_term(g, nodes);
  v.cp = poincare_constant(g, nodes);
  v.clsi = log_sobolev_constant(g);
  return v;
}

FunctionalValues functionals(std::span<const RelativeDensity> factors, std::size_t nodes) {
  if (factors.empty()) throw DomainError("functionals: product with no factors");
  FunctionalValues total;
  total.dimension = 0;
  bool numeric = false, clsi_known = true;
  for (const auto& g : factors) {
    const FunctionalValues v = functionals(g, nodes);
    total.ent += v.ent;
    total.fisher += v.fisher;
    total.cross += v.cross;
    total.dimension += v.dimension;
    total.cp.value = std::max(total.cp.value, v.cp.value);
    total.cp.coarse = total.cp.coarse || v.cp.coarse;
    numeric = numeric || v.cp.provenance == Provenance::spectral_gap_numeric;
    if (v.clsi.available()) total.clsi.value = std::max(total.clsi.value, v.clsi.value);
    else clsi_known = false;
  }
  total.cp.provenance = numeric ? Provenance::spectral_gap_numeric : Provenance::exact_metadata;
  if (clsi_known) total.clsi.provenance = Provenance::exact_metadata;
  else total.clsi = {};
  return total;
}

double cheeger_check(const Evaluator& f, const Evaluator& df) {
  const Grid1D grid(-12.0, 12.0, 4001);
  auto gauss = [](double x) { return std::exp(-0.5 * x * x - 0.5 * kLog2Pi); };
  double mean = 0.0;
  const QuadratureRule r = trapezoid_rule(grid);
  for (std::size_t i = 0; i < r.size(); ++i) mean += r.weights[i] * gauss(r.nodes[i]) * f(r.nodes[i]);
  const double spread = integrate_abs([&](double x) { return f(x) - mean; }, gauss, grid);
  const double energy = integrate_abs(df, gauss, grid);
  return 2.0 * energy - spread;
}

std::optional<double> brascamp_lieb_check(const RelativeDensity& mu, const Evaluator& f,
                                          const Evaluator& df, std::size_t nodes) {
  if (!mu.has_d2log()) throw UnavailableError(mu.label() + ": Brascamp-Lieb needs (log g)''");
  const QuadratureRule r = mu.rule(nodes);
  double mean = 0.0;
  std::vector<double> hess(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    hess[i] = 1.0 - mu.d2log_g(r.nodes[i]);
    if (!(hess[i] > 0.0)) return std::nullopt;
    mean += r.weights[i] * f(r.nodes[i]);
  }
  double var = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = r.nodes[i], c = f(x) - mean, d = df(x);
    var += r.weights[i] * c * c;
    rhs += r.weights[i] * d * d / hess[i];
  }
  return rhs - var;
}

}  // namespace gfi
