#include "gfi/stability.hpp"

#include <algorithm>
#include <cmath>

namespace gfi {

namespace {

const double kOneMinusLog2 = 1.0 - std::log(2.0);

// C log C - C + 1 divided by (C - 1)^2, with its limit 1/2 at C = 1.
double fil_coefficient(double c) {
  const double e = c - 1.0;
  if (std::abs(e) < 1e-4) return 0.5 - e / 6.0 + e * e / 12.0;
  return (c * std::log(c) - c + 1.0) / (e * e);
}

}  // namespace

double delta(double t) {
  if (!(t > -1.0)) throw DomainError("delta: need t > -1");
  if (std::abs(t) < 1e-4) return t * t * (0.5 - t * (1.0 / 3.0 - 0.25 * t));
  return t - std::log1p(t);
}

double delta_star(double s) {
  if (!(s <= 1.0)) throw DomainError("delta_star: need s <= 1");
  if (s == 1.0) return kInf;
  if (std::abs(s) < 1e-4) return s * s * (0.5 + s * (1.0 / 3.0 + 0.25 * s));
  return -s - std::log1p(-s);
}

double lsi_deficit(double fisher, double ent) { return 0.5 * fisher - ent; }
double tal_deficit(double ent, double w2) { return ent - 0.5 * w2 * w2; }
double hwi_gap(double fisher, double ent, double w2) {
  return std::sqrt(fisher) * w2 - 0.5 * w2 * w2 - ent;
}

double bound_fil(double fisher, double cp) {
  if (!(cp > 0.0)) throw DomainError("bound_fil: need C_P > 0");
  return 0.5 * fil_coefficient(cp) * fisher;
}

double bound_mainstab(double fisher, double cp) {
  if (!(cp > 0.0)) throw DomainError("bound_mainstab: need C_P > 0");
  const double d = 1.0 + std::sqrt(cp);
  return fisher / (d * d);
}

std::optional<double> bound_igncp(double cp, int n) {
  if (!(cp > 0.0)) throw DomainError("bound_igncp: need C_P > 0");
  if (cp > 1.0 + 1e-12) return std::nullopt;
  const double c = std::min(cp, 1.0);
  return n * (c * std::log(c) - c + 1.0) / (2.0 * c);
}

double bound_bgrs(double cross, int n) {
  if (n < 1) throw DomainError("bound_bgrs: need n >= 1");
  return n * delta(cross / n - 1.0);
}

TalW11Bound bound_tal_w11(double w11, int n) {
  if (n < 1) throw DomainError("bound_tal_w11: need n >= 1");
  const double t = 0.5 * w11 / std::sqrt(static_cast<double>(n));
  return {delta(t), kOneMinusLog2 * std::min(t, t * t)};
}

double bound_lsi_cost(double k_a, double clsi) {
  if (!(clsi > 0.0)) throw DomainError("bound_lsi_cost: need C_LSI > 0");
  return k_a / clsi;
}

namespace {

std::optional<double> convexity_epsilon(const RelativeDensity& g, std::size_t nodes) {
  if (!g.has_d2log()) return std::nullopt;
  double eps = kInf;
  for (double x : g.grid(nodes).nodes()) eps = std::min(eps, 1.0 - g.d2log_g(x));
  return eps;
}

std::optional<CaffarelliRatio> caffarelli_from(double eps, double ent, double w2) {
  if (!(eps > 0.0) || !(w2 > 1e-8)) return std::nullopt;
  return CaffarelliRatio{(ent / (w2 * w2) - 0.5) / std::sqrt(eps), eps};
}

}  // namespace

std::optional<CaffarelliRatio> caffarelli_ratio(const RelativeDensity& g, double ent, double w2,
                                                std::size_t nodes) {
  const auto eps = convexity_epsilon(g, nodes);
  if (!eps) return std::nullopt;
  return caffarelli_from(*eps, ent, w2);
}

double DeltaLemmaReport::worst() const {
  return std::min({convexity, sqrt_concavity, sqrt_subadditivity, reflection, min_lower_bound});
}

DeltaLemmaReport delta_lemma_checks(std::size_t samples) {
  DeltaLemmaReport r{kInf, kInf, kInf, kInf, kInf};
  const double lo = -1.0, hi = 50.0;
  // Open at -1, closed at 50.
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) t[i] = lo + (hi - lo) * (i + 1.0) / samples;
  auto ds = [](double u) { return delta(std::sqrt(u)); };
  for (std::size_t i = 0; i + 1 < samples; ++i) {
    const double a = t[i], b = t[samples - 1 - i];
    r.convexity = std::min(r.convexity, 0.5 * (delta(a) + delta(b)) - delta(0.5 * (a + b)));
    r.convexity = std::min(r.convexity,
                           0.5 * (delta(a) + delta(t[i + 1])) - delta(0.5 * (a + t[i + 1])));
  }
  std::vector<double> u;
  for (double v : t)
    if (v >= 0.0) u.push_back(v);
  u.insert(u.begin(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i], b = u[u.size() - 1 - i];
    r.sqrt_concavity = std::min(r.sqrt_concavity, ds(0.5 * (a + b)) - 0.5 * (ds(a) + ds(b)));
    r.sqrt_subadditivity = std::min(r.sqrt_subadditivity, ds(a) + ds(b) - ds(a + b));
    r.min_lower_bound = std::min(r.min_lower_bound, delta(a) - kOneMinusLog2 * std::min(a, a * a));
  }
  for (double v : t) r.reflection = std::min(r.reflection, delta(v) - delta(std::abs(v)));
  return r;
}

const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::evaluated: return "evaluated";
    case BoundStatus::hypothesis_unmet: return "hypothesis_unmet";
    case BoundStatus::unavailable: return "unavailable";
  }
  return "unknown";
}

const BoundEntry& DeficitReport::bound(const std::string& name) const {
  for (const auto& b : bounds)
    if (b.name == name) return b;
  throw DomainError("DeficitReport: no bound named " + name);
}

bool is_centered(const RelativeDensity& g) {
  return std::abs(g.mean()) <= 1e-6 * std::sqrt(g.variance());
}

namespace {

BoundEntry entry(std::string name, double deficit, double bound) {
  return {std::move(name), deficit, bound, deficit - bound, BoundStatus::evaluated, {}, {}};
}

BoundEntry skipped(std::string name, double deficit, BoundStatus status, std::string reason,
                   std::string note) {
  BoundEntry b;
  b.name = std::move(name);
  b.deficit = deficit;
  b.status = status;
  b.reason = std::move(reason);
  b.note = std::move(note);
  return b;
}

}  // namespace

DeficitReport deficit_report(std::span<const RelativeDensity> factors, const ReportOptions& options) {
  if (factors.empty()) throw DomainError("deficit_report: no factors");
  DeficitReport r;
  r.functionals = functionals(factors, options.nodes);
  const FunctionalValues& f = r.functionals;
  const int n = f.dimension;

  const RelativeDensity gamma = scaled_gaussian(1.0);
  double w2sq = 0.0, w11 = 0.0, eps = kInf;
  bool convexity_known = true;
  for (const auto& g : factors) {
    PlanOptions po;
    po.nodes = options.nodes;
    po.potentials = false;
    const TransportPlan1D plan(gamma, g, po);
    w2sq += plan.cost_w2();
    w11 += w1(plan);
    r.centered = r.centered && is_centered(g);
    const auto e = convexity_epsilon(g, options.nodes);
    if (e) eps = std::min(eps, *e);
    else convexity_known = false;
  }
  r.w2_to_gamma = std::sqrt(w2sq);
  r.w11_to_gamma = w11;
  r.lsi_deficit = lsi_deficit(f.fisher, f.ent);
  r.tal_deficit = tal_deficit(f.ent, r.w2_to_gamma);
  r.hwi_gap = hwi_gap(f.fisher, f.ent, r.w2_to_gamma);

  const double i_minus_2ent = f.fisher - 2.0 * f.ent;
  const std::string uncentered = "barycenter is not at the origin";

  if (r.centered) r.bounds.push_back(entry("fil", r.lsi_deficit, bound_fil(f.fisher, f.cp.value)));
  else r.bounds.push_back(skipped("fil", r.lsi_deficit, BoundStatus::hypothesis_unmet, "uncentered", uncentered));

  if (r.centered)
    r.bounds.push_back(entry("mainstab", i_minus_2ent, bound_mainstab(f.fisher, f.cp.value)));
  else r.bounds.push_back(skipped("mainstab", i_minus_2ent, BoundStatus::hypothesis_unmet, "uncentered", uncentered));

  if (!r.centered) {
    r.bounds.push_back(skipped("igncp", r.lsi_deficit, BoundStatus::hypothesis_unmet, "uncentered", uncentered));
  } else if (const auto b = bound_igncp(f.cp.value, n)) {
    r.bounds.push_back(entry("igncp", r.lsi_deficit, *b));
  } else {
    r.bounds.push_back(skipped("igncp", r.lsi_deficit, BoundStatus::hypothesis_unmet, "cp_above_one", "C_P > 1"));
  }

  r.bounds.push_back(entry("bgrs", i_minus_2ent, bound_bgrs(f.cross, n)));

  if (r.centered) {
    const TalW11Bound t = bound_tal_w11(w11, n);
    r.bounds.push_back(entry("tal_w11_delta", r.tal_deficit, t.delta_form));
    r.bounds.push_back(entry("tal_w11_min", t.delta_form, t.min_form));
  } else {
    r.bounds.push_back(skipped("tal_w11_delta", r.tal_deficit, BoundStatus::hypothesis_unmet, "uncentered", uncentered));
    r.bounds.push_back(skipped("tal_w11_min", 0.0, BoundStatus::hypothesis_unmet, "uncentered", uncentered));
  }

  if (!options.lsi_cost) {
    r.bounds.push_back(skipped("lsi_cost", r.lsi_deficit, BoundStatus::unavailable, "disabled", "K_a LP disabled"));
  } else if (!f.clsi.available()) {
    r.bounds.push_back(skipped("lsi_cost", r.lsi_deficit, BoundStatus::hypothesis_unmet,
                               "clsi_unknown", "C_LSI not known exactly"));
  } else if (factors.size() != 1) {
    r.bounds.push_back(skipped("lsi_cost", r.lsi_deficit, BoundStatus::unavailable,
                               "product_density", "K_a is computed for one-dimensional measures only"));
  } else {
    const KaCost k = k_a_cost(factors[0], options.ka_atoms);
    BoundEntry b = entry("lsi_cost", r.lsi_deficit, bound_lsi_cost(k.value, f.clsi.value));
    if (k.degenerate) b.note = "a = 0, K_0 set to 0 by convention";
    r.bounds.push_back(b);
  }

  if (!r.centered) {
    r.bounds.push_back(skipped("caffarelli", f.ent, BoundStatus::hypothesis_unmet, "uncentered", uncentered));
  } else if (!convexity_known) {
    r.bounds.push_back(skipped("caffarelli", f.ent, BoundStatus::unavailable, "no_second_derivative",
                               "(log g)'' not available"));
  } else if (!(eps > 0.0)) {
    r.bounds.push_back(skipped("caffarelli", f.ent, BoundStatus::hypothesis_unmet,
                               "not_strongly_log_concave", "1 - (log g)'' is not bounded below by a positive constant"));
  } else if (const auto c = caffarelli_from(eps, f.ent, r.w2_to_gamma)) {
    // Report-only statistic: the ratio sits in the deficit column against a zero bound.
    BoundEntry b = entry("caffarelli", c->ratio, 0.0);
    b.note = "eps=" + std::to_string(c->epsilon);
    r.bounds.push_back(b);
  } else {
    r.bounds.push_back(skipped("caffarelli", f.ent, BoundStatus::hypothesis_unmet, "zero_distance", "W2 = 0"));
  }
  return r;
}

DeficitReport deficit_report(const RelativeDensity& g, const ReportOptions& options) {
  return deficit_report(std::span<const RelativeDensity>(&g, 1), options);
}

}  // namespace gfi
