#include "gfi/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "network_simplex.hpp"

namespace gfi {

namespace {

const double kLogHalf = std::log(0.5);

// Q_to(F_from(x)), evaluated through whichever tail of F_from is smaller.
double map_quantile(const RelativeDensity& from, const RelativeDensity& to, double x,
                    std::optional<double> hint) {
  const double lc = from.log_cdf(x);
  if (lc < kLogHalf) {
    if (lc == -kInf) return to.compact() ? to.support().lo : -kInf;
    return to.quantile_log(lc, Tail::lower, hint);
  }
  const double ls = from.log_sf(x);
  if (ls == -kInf) return to.compact() ? to.support().hi : kInf;
  return to.quantile_log(ls, Tail::upper, hint);
}

// Derivative of the monotone map from -> to at x with image y.
double map_slope(const RelativeDensity& from, const RelativeDensity& to, double x, double y) {
  return std::exp(from.log_rho(x) - to.log_rho(y));
}

double map_curvature(const RelativeDensity& from, const RelativeDensity& to, double x, double y,
                     double slope) {
  return slope * (from.dlog_rho(x) - to.dlog_rho(y) * slope);
}

// Nodes where maps are tabulated: the effective support, pulled slightly
// inward when the support is compact so that endpoint images stay finite.
Grid1D table_grid(const RelativeDensity& g, std::size_t nodes) {
  const Interval s = g.support();
  const double pad = g.compact() ? 1e-9 * s.width() : 0.0;
  return Grid1D(s.lo + pad, s.hi - pad, nodes);
}

// Composite 16-point Gauss-Legendre integral of f over [a, b].
double integrate_segment(const Evaluator& f, double a, double b) {
  static const QuadratureRule gl = gauss_legendre(16);
  if (a == b) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / 0.25)));
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < gl.size(); ++i) s += gl.weights[i] * f(mid + 0.5 * h * gl.nodes[i]);
  }
  return 0.5 * h * s;
}

}  // namespace

// A potential P tabulated on a uniform grid together with P' and P'', so that
// P interpolates by cubic Hermite pieces. Off the grid it is integrated directly.
struct PotentialTable {
  Grid1D grid{0.0, 1.0, 3};
  std::vector<double> value, slope;
  Evaluator derivative;
  double origin = 0.0, origin_value = 0.0;  // normalization point, reproduced exactly

  double operator()(double x) const {
    if (x == origin) return origin_value;
    const double lo = grid.lo(), hi = grid.hi();
    if (x < lo) return value.front() - integrate_segment(derivative, x, lo);
    if (x > hi) return value.back() + integrate_segment(derivative, hi, x);
    const double h = grid.spacing();
    const std::size_t k = std::min(grid.size() - 2, static_cast<std::size_t>((x - lo) / h));
    return hermite_value(grid[k], grid[k + 1], value[k], value[k + 1], slope[k], slope[k + 1], x);
  }
};

namespace {

// Builds P with P(origin) = p0 from samples of P' and P'' on the grid, using
// the endpoint-corrected trapezoid rule between nodes.
PotentialTable build_potential(const Grid1D& grid, std::vector<double> d1,
                               const std::vector<double>& d2, double origin, double p0,
                               Evaluator derivative) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::size_t k0 = 0;
  if (origin >= grid.hi()) {
    k0 = n - 1;
  } else if (origin > grid.lo()) {
    k0 = static_cast<std::size_t>(std::llround((origin - grid.lo()) / h));
    k0 = std::min(k0, n - 1);
  }
  std::vector<double> p(n);
  p[k0] = p0 + (origin < grid[k0] ? integrate_segment(derivative, origin, grid[k0])
                                  : -integrate_segment(derivative, grid[k0], origin));
  auto step = [&](std::size_t a, std::size_t b) {
    return 0.5 * h * (d1[a] + d1[b]) + h * h / 12.0 * (d2[a] - d2[b]);
  };
  for (std::size_t k = k0 + 1; k < n; ++k) p[k] = p[k - 1] + step(k - 1, k);
  for (std::size_t k = k0; k-- > 0;) p[k] = p[k + 1] - step(k, k + 1);
  PotentialTable t;
  t.grid = grid;
  t.value = std::move(p);
  t.slope = std::move(d1);
  t.derivative = std::move(derivative);
  t.origin = origin;
  t.origin_value = p0;
  return t;
}

}  // namespace

struct TransportPlan1D::Tables {
  PotentialTable phi, psi;
};

TransportPlan1D::TransportPlan1D(RelativeDensity source, RelativeDensity target,
                                 const PlanOptions& options)
    : src_(std::move(source)), tgt_(std::move(target)) {
  const std::size_t nodes = std::max<std::size_t>(options.nodes, 3);

  Samples s = sample(nodes);
  double cost = 0.0;
  for (std::size_t i = 0; i < s.rule.size(); ++i) {
    const double d = s.t[i] - s.rule.nodes[i];
    cost += s.rule.weights[i] * d * d;
  }
  if (!std::isfinite(cost)) throw NumericalError("monotone_map: non-finite transport cost");
  cost_w2_ = cost;

  const Grid1D inner = table_grid(src_, 3);
  const double a = std::max(-6.0, inner.lo()), b = std::min(6.0, inner.hi());
  if (!options.validate) pushforward_residual_ = std::nan("");
  if (options.validate && a < b) {
    const Grid1D test(a, b, 1201);
    double prev = -kInf, prev_x = a, res = 0.0;
    std::optional<double> hint;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double x = test[i];
      const double y = T(x, hint);
      if (!std::isfinite(y) && !tgt_.compact())
        throw NumericalError("monotone_map: CDF inversion failed at x=" + std::to_string(x));
      if (i > 0 && !(y > prev) && !(tgt_.compact() && y == prev)) {
        std::ostringstream msg;
        msg << "monotone_map: map not increasing between x=" << prev_x << " and x=" << x;
        throw NumericalError(msg.str());
      }
      res = std::max(res, std::abs(tgt_.cdf(y) - src_.cdf(x)));
      prev = y;
      prev_x = x;
      hint = y;
    }
    pushforward_residual_ = res;
  }

  if (!options.potentials) return;

  auto tables = std::make_shared<Tables>();
  {
    const Grid1D grid = table_grid(src_, nodes);
    std::vector<double> d1(grid.size()), d2(grid.size());
    std::optional<double> hint;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i], y = map_quantile(src_, tgt_, x, hint);
      d1[i] = y - x;
      d2[i] = map_slope(src_, tgt_, x, y) - 1.0;
      hint = y;
    }
    tables->phi = build_potential(grid, std::move(d1), d2, 0.0, 0.0,
                                  [from = src_, to = tgt_](double x) { return map_quantile(from, to, x, {}) - x; });
  }
  {
    const double x0 = 0.0, y0 = T(x0), f0 = y0 - x0;
    const Grid1D grid = table_grid(tgt_, nodes);
    std::vector<double> d1(grid.size()), d2(grid.size());
    std::optional<double> hint;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double y = grid[i], x = map_quantile(tgt_, src_, y, hint);
      d1[i] = x - y;
      d2[i] = map_slope(tgt_, src_, y, x) - 1.0;
      hint = x;
    }
    tables->psi = build_potential(grid, std::move(d1), d2, y0, -0.5 * f0 * f0,
                                  [from = tgt_, to = src_](double y) { return map_quantile(from, to, y, {}) - y; });
  }
  tables_ = std::move(tables);
}

double TransportPlan1D::T(double x, std::optional<double> hint) const {
  return map_quantile(src_, tgt_, x, hint);
}

double TransportPlan1D::Tprime(double x) const { return map_slope(src_, tgt_, x, T(x)); }

double TransportPlan1D::Tsecond(double x) const {
  const double y = T(x);
  return map_curvature(src_, tgt_, x, y, map_slope(src_, tgt_, x, y));
}

double TransportPlan1D::S(double y, std::optional<double> hint) const {
  return map_quantile(tgt_, src_, y, hint);
}

double TransportPlan1D::phi(double x) const {
  if (!tables_) throw DomainError("TransportPlan1D: potentials were not built");
  return tables_->phi(x);
}

double TransportPlan1D::psi(double y) const {
  if (!tables_) throw DomainError("TransportPlan1D: potentials were not built");
  return tables_->psi(y);
}

TransportPlan1D::Samples TransportPlan1D::sample(std::size_t nodes) const {
  Samples s;
  if (src_.compact()) {
    // Interior nodes only: the map may be unbounded at a compact edge.
    const QuadratureRule gl = gauss_legendre(static_cast<int>(nodes));
    const Interval si = src_.support();
    const double c = 0.5 * (si.lo + si.hi), r = 0.5 * si.width();
    s.rule.nodes.resize(gl.size());
    s.rule.weights.resize(gl.size());
    for (std::size_t i = 0; i < gl.size(); ++i) {
      s.rule.nodes[i] = c + r * gl.nodes[i];
      s.rule.weights[i] = r * gl.weights[i] * src_.rho(s.rule.nodes[i]);
    }
  } else {
    s.rule = src_.rule(nodes);
  }
  const std::size_t n = s.rule.size();
  s.t.resize(n);
  s.tp.resize(n);
  s.tpp.resize(n);
  std::optional<double> hint;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = s.rule.nodes[i], y = T(x, hint);
    s.t[i] = y;
    s.tp[i] = map_slope(src_, tgt_, x, y);
    s.tpp[i] = map_curvature(src_, tgt_, x, y, s.tp[i]);
    if (std::isfinite(y)) hint = y;
  }
  return s;
}

TransportPlan1D monotone_map(const RelativeDensity& mu, const RelativeDensity& nu,
                             const PlanOptions& options) {
  return TransportPlan1D(mu, nu, options);
}

namespace {

TransportPlan1D cost_only(const RelativeDensity& mu, const RelativeDensity& nu) {
  PlanOptions o;
  o.potentials = false;
  return TransportPlan1D(mu, nu, o);
}

}  // namespace

double w2_squared(const RelativeDensity& mu, const RelativeDensity& nu) {
  return cost_only(mu, nu).cost_w2();
}

double w2(const RelativeDensity& mu, const RelativeDensity& nu) {
  return std::sqrt(w2_squared(mu, nu));
}

double w1(const TransportPlan1D& plan) {
  // |T(x) - x| has kinks where the map crosses the diagonal; integrate_abs
  // splits cells there.
  const auto& mu = plan.source();
  return integrate_abs([&](double x) { return plan.T(x) - x; },
                       [&](double x) { return mu.rho(x); }, table_grid(mu, kDefaultNodes));
}

double w1(const RelativeDensity& mu, const RelativeDensity& nu) { return w1(cost_only(mu, nu)); }

double w11_product(std::span<const TransportPlan1D> plans) {
  if (plans.empty()) throw DomainError("w11_product: no coordinate plans");
  double total = 0.0;
  for (const auto& p : plans) total += w1(p);
  return total;
}

double w2_squared_product(std::span<const TransportPlan1D> plans) {
  if (plans.empty()) throw DomainError("w2_squared_product: no coordinate plans");
  double total = 0.0;
  for (const auto& p : plans) total += p.cost_w2();
  return total;
}

double duality_residual(const TransportPlan1D& plan) {
  if (!plan.has_potentials()) throw DomainError("duality_residual: plan has no potentials");
  const Interval si = plan.source().support();
  const double a = std::max(-6.0, si.lo), b = std::min(6.0, si.hi);
  if (!(a < b)) return 0.0;
  const Grid1D test(a, b, 601);
  double worst = 0.0;
  std::optional<double> hint;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double x = test[i], y = plan.T(x, hint), d = y - x;
    worst = std::max(worst, std::abs(0.5 * d * d + plan.phi(x) + plan.psi(y)));
    hint = y;
  }
  return worst;
}

DiscretePlan lp_transport(const DiscreteMeasure& source, const DiscreteMeasure& target,
                          const CostFunction& cost) {
  auto check = [](const DiscreteMeasure& m, const char* side) {
    if (m.atoms.empty() || m.atoms.size() != m.weights.size())
      throw DomainError(std::string("lp_transport: malformed ") + side + " measure");
    if (m.atoms.size() > 4096)
      throw DomainError(std::string("lp_transport: too many ") + side + " atoms");
    double total = 0.0;
    for (double w : m.weights) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw DomainError(std::string("lp_transport: negative or non-finite ") + side + " weight");
      total += w;
    }
    return total;
  };
  const double ma = check(source, "source"), mb = check(target, "target");
  if (std::abs(ma - mb) > 1e-9) {
    std::ostringstream msg;
    msg << "lp_transport: infeasible marginals, masses " << ma << " and " << mb;
    throw DomainError(msg.str());
  }
  const std::size_t m = source.atoms.size(), n = target.atoms.size();
  std::vector<double> c(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = cost(source.atoms[i], target.atoms[j]);
      if (!std::isfinite(v)) throw DomainError("lp_transport: cost is not finite on all pairs");
      c[i * n + j] = v;
    }
  auto sol = detail::transportation_simplex(source.weights, target.weights, c);

  DiscretePlan plan;
  plan.source = source;
  plan.target = target;
  plan.coupling = std::move(sol.flow);
  plan.u = std::move(sol.u);
  plan.v = std::move(sol.v);
  double total = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) total += plan.coupling[k] * c[k];
  plan.cost = total;
  return plan;
}

DiscreteMeasure quantile_atoms(const RelativeDensity& g, std::size_t n) {
  if (n == 0) throw DomainError("quantile_atoms: need at least one atom");
  DiscreteMeasure d;
  d.atoms.resize(n);
  d.weights.assign(n, 1.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) d.atoms[k] = g.quantile((k + 0.5) / static_cast<double>(n));
  return d;
}

double ka_cost_function(double a, double d) {
  if (!(a > 0.0)) throw DomainError("ka_cost_function: a must be positive");
  const double r = d * d / (a * a);
  const double rlogr = r > 0.0 ? r * std::log(r) : 0.0;
  return a * a * (1.0 - r + rlogr);
}

KaCost k_a_cost(const RelativeDensity& nu, std::size_t atoms) {
  const RelativeDensity gamma = scaled_gaussian(1.0);
  const double a = w2(nu, gamma);
  if (a < 1e-10) return {0.0, a, true};
  const auto plan = lp_transport(quantile_atoms(nu, atoms), quantile_atoms(gamma, atoms),
                                 [a](double x, double y) { return ka_cost_function(a, x - y); });
  return {plan.cost, a, false};
}

}  // namespace gfi
