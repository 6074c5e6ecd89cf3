#include "gfi/identities.hpp"

#include <cmath>

#include "gfi/functionals.hpp"
#include "gfi/stability.hpp"

namespace gfi {

double IdentityReport::term(const std::string& name) const {
  for (const auto& [k, v] : terms)
    if (k == name) return v;
  throw DomainError("IdentityReport: no term named " + name);
}

namespace {

void require_third_derivative(const RelativeDensity& g) {
  if (g.compact()) throw UnavailableError(g.label() + ": compact support, I(g) is infinite");
  if (!g.has_d2log())
    throw UnavailableError(g.label() + ": third potential derivative needs (log g)''");
}

IdentityReport finish(double lhs, std::vector<std::pair<std::string, double>> terms) {
  IdentityReport r;
  r.lhs = lhs;
  for (const auto& t : terms) r.rhs += t.second;
  r.residual = std::abs(r.lhs - r.rhs);
  r.terms = std::move(terms);
  return r;
}

TransportPlan1D plan_to(const RelativeDensity& g, const RelativeDensity& f, std::size_t nodes) {
  PlanOptions o;
  o.nodes = nodes;
  o.potentials = false;
  return TransportPlan1D(g, f, o);
}

}  // namespace

IdentityReport ent_iden(const RelativeDensity& g, const RelativeDensity& f, std::size_t nodes) {
  const auto plan = plan_to(g, f, nodes);
  const auto s = plan.sample(nodes);
  double ent_g = 0.0, half_w2 = 0.0, drift = 0.0, remainder = 0.0;
  for (std::size_t i = 0; i < s.rule.size(); ++i) {
    const double x = s.rule.nodes[i], w = s.rule.weights[i];
    if (w == 0.0) continue;
    const double du = s.t[i] - x, d2u = s.tp[i] - 1.0;
    if (!(s.tp[i] > 0.0)) {
      throw NumericalError("ent_iden: 1 + u'' is not positive at x=" + std::to_string(x));
    }
    ent_g += w * g.log_g(x);
    half_w2 += w * 0.5 * du * du;
    drift += w * du * g.dlog_g(x);
    remainder += w * delta(d2u);
  }
  return finish(entropy(f, nodes), {{"ent_g", ent_g},
                                    {"half_w2", half_w2},
                                    {"drift", drift},
                                    {"hessian_remainder", remainder}});
}

IdentityReport bochner_identity(const RelativeDensity& g, std::size_t nodes) {
  require_third_derivative(g);
  const auto plan = plan_to(g, scaled_gaussian(1.0), nodes);
  const auto s = plan.sample(nodes);
  double two_ent = 0.0, two_delta = 0.0, hess_sq = 0.0, third = 0.0, fisher = 0.0;
  for (std::size_t i = 0; i < s.rule.size(); ++i) {
    const double x = s.rule.nodes[i], w = s.rule.weights[i];
    if (w == 0.0) continue;
    const double p2 = s.tp[i] - 1.0, ratio = s.tpp[i] / s.tp[i], score = g.dlog_g(x);
    fisher += w * score * score;
    two_ent += w * 2.0 * g.log_g(x);
    two_delta += w * 2.0 * delta(p2);
    hess_sq += w * p2 * p2;
    third += w * ratio * ratio;
  }
  return finish(fisher, {{"two_ent", two_ent},
                         {"two_delta", two_delta},
                         {"hessian_sq", hess_sq},
                         {"third_order", third}});
}

IdentityReport cross_identity(const RelativeDensity& g, std::size_t nodes) {
  require_third_derivative(g);
  const auto plan = plan_to(g, scaled_gaussian(1.0), nodes);
  const auto s = plan.sample(nodes);
  double cross = 0.0, hess_sq = 0.0, third = 0.0;
  for (std::size_t i = 0; i < s.rule.size(); ++i) {
    const double x = s.rule.nodes[i], w = s.rule.weights[i];
    if (w == 0.0) continue;
    const double c = g.dlog_g(x) - x, ratio = s.tpp[i] / s.tp[i];
    cross += w * c * c;
    hess_sq += w * s.tp[i] * s.tp[i];
    third += w * ratio * ratio;
  }
  return finish(cross, {{"hessian_sq", hess_sq}, {"third_order", third}});
}

}  // namespace gfi
