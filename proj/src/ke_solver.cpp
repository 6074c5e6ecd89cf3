#include "gfi/ke_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "gfi/stability.hpp"
#include "gfi/transport.hpp"

namespace gfi {

namespace {

const double kLogHalf = -std::log(2.0);

// Quantile of nu as a function of the log of one tail probability, with the partial first
// moment m = int_{tail} |t| drho accumulated alongside.
class TailTable {
 public:
  TailTable(const RelativeDensity& nu, Tail tail, double lmin, double lmax, double step)
      : lmin_(lmin), step_(step), upper_(tail == Tail::upper) {
    if (nu.compact()) bounds_ = nu.support();
    const std::size_t n = static_cast<std::size_t>(std::ceil((lmax - lmin) / step)) + 1;
    q_.resize(n);
    dq_.resize(n);
    m_.resize(n);
    std::optional<double> hint;
    for (std::size_t k = n; k-- > 0;) {
      const double l = node(k);
      q_[k] = nu.quantile_log(l, tail, hint);
      hint = q_[k];
      const double d = std::exp(l - nu.log_rho(q_[k]));
      dq_[k] = std::isfinite(d) ? (upper_ ? -d : d) : 0.0;
    }
    // Integrand |Q| e^l (Q < 0 in the lower tail, > 0 in the upper tail of a centered nu).
    const double sign = upper_ ? 1.0 : -1.0;
    auto f = [&](std::size_t k) { return sign * q_[k] * std::exp(node(k)); };
    auto df = [&](std::size_t k) { return sign * (dq_[k] + q_[k]) * std::exp(node(k)); };
    m_[0] = f(0);
    for (std::size_t k = 0; k + 1 < n; ++k)
      m_[k + 1] = m_[k] + 0.5 * step_ * (f(k) + f(k + 1)) + step_ * step_ / 12.0 * (df(k) - df(k + 1));
  }

  double lmin() const { return lmin_; }
  double lmax() const { return node(q_.size() - 1); }
  double node(std::size_t k) const { return lmin_ + static_cast<double>(k) * step_; }
  std::size_t index(double l) const {
    return static_cast<std::size_t>(std::llround((l - lmin_) / step_));
  }
  double moment(std::size_t k) const { return m_[k]; }

  double value(double l) const {
    l = std::min(l, lmax());
    const std::size_t k = std::min(q_.size() - 2, static_cast<std::size_t>((l - lmin_) / step_));
    const double q = hermite_value(node(k), node(k + 1), q_[k], q_[k + 1], dq_[k], dq_[k + 1], l);
    return std::clamp(q, bounds_.lo, bounds_.hi);
  }

  // Width in x of the solution between the log-tail l0 and the median: int e^l / m dl.
  double width(double l0) const {
    double w = 0.0;
    for (std::size_t k = index(l0); k + 1 < q_.size() && node(k + 1) <= kLogHalf; ++k)
      w += 0.5 * step_ * (std::exp(node(k)) / m_[k] + std::exp(node(k + 1)) / m_[k + 1]);
    return w;
  }

 private:
  double lmin_, step_;
  bool upper_;
  Interval bounds_{-kInf, kInf};
  std::vector<double> q_, dq_, m_;
};

// Phi and the log of the smaller tail of G.
struct State {
  double Phi;
  double s;
  bool upper;
};

class Integrator {
 public:
  Integrator(const TailTable& lo, const TailTable& up) : lo_(lo), up_(up) {}

  // False once the state leaves the tables, i.e. the piece has run out of mass.
  bool rhs(const State& y, double& dPhi, double& ds) const {
    const TailTable& t = y.upper ? up_ : lo_;
    if (!(y.s >= t.lmin()) || !std::isfinite(y.Phi)) return false;
    dPhi = t.value(y.s);
    const double e = std::exp(-y.Phi - y.s);
    if (!std::isfinite(e)) return false;
    ds = y.upper ? -e : e;
    return true;
  }

  bool step(State& y, double h) const {
    double k1p, k1s, k2p, k2s, k3p, k3s, k4p, k4s;
    if (!rhs(y, k1p, k1s)) return false;
    if (!rhs({y.Phi + 0.5 * h * k1p, y.s + 0.5 * h * k1s, y.upper}, k2p, k2s)) return false;
    if (!rhs({y.Phi + 0.5 * h * k2p, y.s + 0.5 * h * k2s, y.upper}, k3p, k3s)) return false;
    if (!rhs({y.Phi + h * k3p, y.s + h * k3s, y.upper}, k4p, k4s)) return false;
    y.Phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    y.s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    if (!std::isfinite(y.Phi) || !std::isfinite(y.s)) return false;
    if (y.s > kLogHalf) {
      y.s = std::log1p(-std::exp(y.s));
      y.upper = !y.upper;
    }
    return true;
  }

  double quantile(const State& y) const { return (y.upper ? up_ : lo_).value(y.s); }

 private:
  const TailTable& lo_;
  const TailTable& up_;
};

double logit(const State& y) {
  const double rest = std::log1p(-std::exp(y.s));
  return y.upper ? rest - y.s : y.s - rest;
}

double lower_cdf(const State& y) { return y.upper ? -std::expm1(y.s) : std::exp(y.s); }

struct Shot {
  std::vector<State> states;
  double Phi_right_at_match = 0.0;
  double mismatch = 0.0;  // logit G_left - logit G_right at the matching node
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double MomentSolution::Phi(std::size_t i) const {
  const double x = grid[i];
  return 0.5 * x * x + phi[i] + 0.5 * kLog2Pi;
}

namespace {

std::size_t cell_of(const Grid1D& g, double x) {
  const double t = (x - g.lo()) / g.spacing();
  return std::min(g.size() - 2, static_cast<std::size_t>(std::max(0.0, t)));
}

}  // namespace

double MomentSolution::phi_at(double x) const {
  if (!contains(x)) throw DomainError("MomentSolution: x=" + fmt(x) + " outside the solution window");
  const std::size_t k = cell_of(grid, x);
  const double x0 = grid[k], x1 = grid[k + 1];
  return hermite_value(x0, x1, phi[k], phi[k + 1], T[k] - x0, T[k + 1] - x1, x);
}

double MomentSolution::T_at(double x) const {
  if (!contains(x)) throw DomainError("MomentSolution: x=" + fmt(x) + " outside the solution window");
  const std::size_t k = cell_of(grid, x);
  return hermite_value(grid[k], grid[k + 1], T[k], T[k + 1], Tprime[k], Tprime[k + 1], x);
}

double MomentSolution::min_curvature() const {
  double m = kInf;
  for (double d : Tprime) m = std::min(m, d);
  for (std::size_t i = 0; i + 1 < T.size(); ++i) m = std::min(m, (T[i + 1] - T[i]) / grid.spacing());
  return m;
}

RelativeDensity MomentSolution::density() const {
  std::vector<double> lg(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) lg[i] = -phi[i];
  return grid_density(grid, lg);
}

void MomentSolution::write_csv(std::ostream& out) const {
  out << "x,phi,rho,T,residual\n";
  char buf[160];
  for (std::size_t i = 0; i < phi.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e\n", grid[i], phi[i], rho(i), T[i],
                  residual[i]);
    out << buf;
  }
}

MomentSolution solve_1d(const RelativeDensity& nu, const SolverOptions& options) {
  if (!is_centered(nu))
    throw DomainError("solve_1d: nu must be centered (mean " + fmt(nu.mean()) + ")");
  if (!(options.log_tail < -1.0)) throw DomainError("solve_1d: log_tail must be below -1");

  const double l0 = options.log_tail;
  const double table_step = 0.01;
  const double lmin = l0 - 8.0;
  const TailTable lo(nu, Tail::lower, lmin, std::log(0.95), table_step);
  const TailTable up(nu, Tail::upper, lmin, std::log(0.95), table_step);
  const std::size_t k0 = lo.index(l0);
  const double m_lo = lo.moment(k0), m_up = up.moment(k0);
  if (!(m_lo > 0.0) || !(m_up > 0.0)) throw NumericalError("solve_1d: quantile failure in the tails");

  // Window: the predicted extent of the solution plus a pad that the tails absorb.
  const double a = -(lo.width(l0) + options.pad), b = up.width(l0) + options.pad;
  const std::size_t n = std::max<std::size_t>(
      options.nodes, static_cast<std::size_t>(std::ceil((b - a) / options.max_step)) + 1);
  const Grid1D grid(a, b, n);
  const double h = grid.spacing();
  const std::size_t c = std::min(n - 2, static_cast<std::size_t>(std::llround(-a / h)));
  const double tail = std::exp(l0);

  const Integrator ode(lo, up);

  // u scales the left anchor: e^{-Phi(a)} = m_lo e^u. The right anchor carries the same
  // constant H = e^{-Phi} - m(Q(G)) that the exact flow conserves.
  auto shoot = [&](double u, bool keep) -> Shot {
    Shot s;
    const double right = m_up + m_lo * std::expm1(u);
    if (!(right > 0.0)) {
      s.mismatch = -kInf;
      return s;
    }
    if (keep) s.states.resize(n);
    State y{-std::log(m_lo) - u, l0, false};
    if (keep) s.states[0] = y;
    for (std::size_t i = 0; i < c; ++i) {
      if (!ode.step(y, h)) {
        s.mismatch = kInf;
        return s;
      }
      if (keep) s.states[i + 1] = y;
    }
    State z{-std::log(right), l0, true};
    if (keep) s.states[n - 1] = z;
    for (std::size_t i = n - 1; i > c; --i) {
      if (!ode.step(z, -h)) {
        s.mismatch = kInf;
        return s;
      }
      if (keep && i - 1 > c) s.states[i - 1] = z;
    }
    s.Phi_right_at_match = z.Phi;
    s.mismatch = logit(y) - logit(z);
    return s;
  };

  // Bracket: mismatch is increasing in u.
  double ua = 0.0, fa = shoot(0.0, false).mismatch;
  if (fa == 0.0) fa = -0.0;
  double ub = ua, fb = fa;
  const double dir = fa < 0 ? 1.0 : -1.0;
  double step = 1.0;
  for (int it = 0; (fb < 0) == (fa < 0); ++it) {
    if (it > 40) throw NumericalError("solve_1d: shooting bracket not found");
    ua = ub;
    fa = fb;
    ub = ua + dir * step;
    fb = shoot(ub, false).mismatch;
    step *= 2.0;
  }
  if (ua > ub) {
    std::swap(ua, ub);
    std::swap(fa, fb);
  }

  // Bisection until both ends are finite, then Illinois-modified secant steps.
  double u = 0.5 * (ua + ub), f = 0.0;
  int iterations = 0;
  bool converged = false;
  int side = 0;
  for (; iterations < options.max_iterations; ++iterations) {
    if (std::isfinite(fa) && std::isfinite(fb)) {
      u = ub - fb * (ub - ua) / (fb - fa);
      if (!(u > ua && u < ub)) u = 0.5 * (ua + ub);
    } else {
      u = 0.5 * (ua + ub);
    }
    f = shoot(u, false).mismatch;
    if (std::abs(f) <= 1e-12 || ub - ua <= 1e-15 * std::max(1.0, std::abs(u))) {
      converged = true;
      break;
    }
    if (f < 0) {
      ua = u;
      fa = f;
      if (side == -1 && std::isfinite(fb)) fb *= 0.5;
      side = -1;
    } else {
      ub = u;
      fb = f;
      if (side == 1 && std::isfinite(fa)) fa *= 0.5;
      side = 1;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "solve_1d: no convergence after " << options.max_iterations
        << " bisection+secant steps (u in [" << ua << ", " << ub << "], mismatch " << f << ")";
    throw NumericalError(msg.str());
  }

  const Shot best = shoot(u, true);
  if (!std::isfinite(best.mismatch)) throw NumericalError("solve_1d: final shot failed");

  MomentSolution sol;
  sol.iterations = iterations + 1;
  sol.beta = best.states[0].Phi;
  sol.match_jump = std::abs(best.states[c].Phi - best.Phi_right_at_match);

  std::vector<double> Phi(n), lower(n);
  sol.T.resize(n);
  sol.Tprime.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const State& y = best.states[i];
    Phi[i] = y.Phi;
    lower[i] = lower_cdf(y);
    sol.T[i] = ode.quantile(y);
    const double d = std::exp(-y.Phi - nu.log_rho(sol.T[i]));
    sol.Tprime[i] = std::isfinite(d) ? d : 0.0;
  }

  // Mass and barycenter by the trapezoid rule, then translate.
  double mass = 0.0, first = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n ? 0.5 : 1.0) * h * std::exp(-Phi[i]);
    mass += w;
    first += w * grid[i];
  }
  const double bary = first / mass;
  sol.shift = -bary;
  sol.mass_error = std::abs(mass - 1.0);
  sol.grid = Grid1D(a - bary, b - bary, n);

  sol.phi.resize(n);
  double recentered = 0.0, w2sq = 0.0, ent = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sol.grid[i];
    sol.phi[i] = Phi[i] - 0.5 * x * x - 0.5 * kLog2Pi;
    const double w = (i == 0 || i + 1 == n ? 0.5 : 1.0) * h * std::exp(-Phi[i]);
    recentered += w * x;
    w2sq += w * (sol.T[i] - x) * (sol.T[i] - x);
    ent -= w * sol.phi[i];
  }
  sol.barycenter_error = std::abs(recentered / mass);
  sol.f_gamma = -0.5 * w2sq + ent;

  // Pushforward residual: CDF of mu accumulated from e^{-Phi} against F_nu(T).
  sol.residual.resize(n);
  double cum = tail;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const double f0 = std::exp(-Phi[i - 1]), f1 = std::exp(-Phi[i]);
      const double d0 = -sol.T[i - 1] * f0, d1 = -sol.T[i] * f1;
      cum += 0.5 * h * (f0 + f1) + h * h / 12.0 * (d0 - d1);
    }
    const double fnu = lower[i] <= 0.5 ? nu.cdf(sol.T[i]) : 1.0 - nu.sf(sol.T[i]);
    sol.residual[i] = std::abs(fnu - cum);
    sol.pushforward_residual = std::max(sol.pushforward_residual, sol.residual[i]);
  }
  return sol;
}

double f_gamma(const RelativeDensity& rho, const RelativeDensity& nu, std::size_t nodes) {
  PlanOptions po;
  po.nodes = nodes;
  po.potentials = false;
  po.validate = false;
  const TransportPlan1D plan(rho, nu, po);
  return -0.5 * plan.cost_w2() + entropy(rho, nodes);
}

double j_functional(const Grid1D& ygrid, std::span<const double> f, const RelativeDensity& nu) {
  const std::size_t n = ygrid.size();
  if (f.size() != n) throw DomainError("j_functional: size mismatch");
  for (double v : f)
    if (!std::isfinite(v)) throw DomainError("j_functional: f must be finite on the grid");

  // Slope range of the convex hull of f.
  double smin = kInf, smax = -kInf;
  for (std::size_t j = 1; j < n; ++j) smin = std::min(smin, (f[j] - f[0]) / (ygrid[j] - ygrid[0]));
  for (std::size_t j = 0; j + 1 < n; ++j)
    smax = std::max(smax, (f[n - 1] - f[j]) / (ygrid[n - 1] - ygrid[j]));
  if (!(smax > smin)) throw NumericalError("j_functional: degenerate slope range");

  const Grid1D xgrid(smin, smax, n);
  const std::vector<double> fs = legendre_transform(ygrid, f, xgrid);
  std::vector<double> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (fs[i] == kInf) continue;
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    terms.push_back(-fs[i] + std::log(w));
  }
  if (terms.empty()) throw NumericalError("j_functional: e^{-f*} vanishes on the grid");
  const double log_int = std::log(xgrid.spacing()) + log_sum_exp(terms);
  if (!std::isfinite(log_int)) throw NumericalError("j_functional: divergent integral of e^{-f*}");

  double mean_f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = ygrid[i];
    if (nu.compact() && !nu.support().contains(y)) continue;
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    mean_f += w * ygrid.spacing() * nu.rho(y) * f[i];
  }
  return log_int - mean_f;
}

std::vector<double> conjugate_potential(const MomentSolution& sol, const Grid1D& ygrid) {
  const Grid1D& g = sol.grid;
  const std::size_t n = g.size();
  auto Phi_at = [&](double x) { return 0.5 * x * x + sol.phi_at(x) + 0.5 * kLog2Pi; };
  std::vector<double> out(ygrid.size());
  for (std::size_t j = 0; j < ygrid.size(); ++j) {
    const double y = ygrid[j];
    double x;
    if (y <= sol.T.front()) {
      x = g.lo();
    } else if (y >= sol.T.back()) {
      x = g.hi();
    } else {
      const auto it = std::upper_bound(sol.T.begin(), sol.T.end(), y);
      const std::size_t k = std::min<std::size_t>(n - 2, static_cast<std::size_t>(it - sol.T.begin()) - 1);
      if (sol.T[k + 1] - sol.T[k] <= 0.0) {
        x = g[k];
      } else {
        auto r = [&](double t) {
          return hermite_value(g[k], g[k + 1], sol.T[k], sol.T[k + 1], sol.Tprime[k], sol.Tprime[k + 1], t) - y;
        };
        const double ra = r(g[k]), rb = r(g[k + 1]);
        if (ra >= 0.0) x = g[k];
        else if (rb <= 0.0) x = g[k + 1];
        else x = brent_root(r, g[k], g[k + 1], 1e-15);
      }
    }
    out[j] = x * y - Phi_at(x);
  }
  return out;
}

std::vector<Evaluator> standard_bumps(const RelativeDensity& m) {
  const double w = 0.5 * std::sqrt(m.variance());
  std::vector<Evaluator> out;
  for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double c = m.quantile(p);
    out.push_back([c, w](double x) { return std::exp(-0.5 * (x - c) * (x - c) / (w * w)); });
  }
  return out;
}

PerturbationMargin local_min_check(const MomentSolution& sol, const RelativeDensity& nu) {
  const RelativeDensity base = sol.density();
  const std::size_t nodes = 1001;
  const double f0 = f_gamma(base, nu, nodes);
  PerturbationMargin out;
  const auto bumps = standard_bumps(base);
  std::vector<double> lg(sol.phi.size());
  for (std::size_t k = 0; k < bumps.size(); ++k) {
    for (double eps : kPerturbationSizes) {
      for (std::size_t i = 0; i < lg.size(); ++i) lg[i] = -sol.phi[i] + eps * bumps[k](sol.grid[i]);
      const RelativeDensity pert = recenter(grid_density(sol.grid, lg));
      const double d = f_gamma(pert, nu, nodes) - f0;
      if (d < out.margin) out = {d, eps, static_cast<int>(k)};
    }
  }
  return out;
}

PerturbationMargin j_max_check(const MomentSolution& sol, const RelativeDensity& nu) {
  const Grid1D ygrid = nu.grid(kDefaultNodes);
  const std::vector<double> base = conjugate_potential(sol, ygrid);
  const double j0 = j_functional(ygrid, base, nu);
  PerturbationMargin out;
  const auto bumps = standard_bumps(nu);
  std::vector<double> f(base.size());
  for (std::size_t k = 0; k < bumps.size(); ++k) {
    for (double eps : kPerturbationSizes) {
      for (std::size_t i = 0; i < f.size(); ++i) f[i] = base[i] + eps * bumps[k](ygrid[i]);
      const double d = j0 - j_functional(ygrid, f, nu);
      if (d < out.margin) out = {d, eps, static_cast<int>(k)};
    }
  }
  return out;
}

namespace {

// Trapezoid weights of mu = e^{-Phi} dx on the solution grid.
std::vector<double> mu_weights(const MomentSolution& sol) {
  const std::size_t n = sol.grid.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = (i == 0 || i + 1 == n ? 0.5 : 1.0) * sol.grid.spacing() * std::exp(-sol.Phi(i));
  return w;
}

}  // namespace

AprioriReport apriori_checks(const MomentSolution& sol, const RelativeDensity& nu) {
  AprioriReport r;
  const auto w = mu_weights(sol);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = sol.T[i] - sol.grid[i];
    r.w2_squared += w[i] * d * d;
    r.entropy_rho -= w[i] * sol.phi[i];
  }
  // (log rho)' = -phi', so I(rho) is the transport cost.
  r.fisher_rho = r.w2_squared;
  r.f_gamma = -0.5 * r.w2_squared + r.entropy_rho;
  r.fisher_g = fisher_information(nu);

  r.gap = spectral_gap(
      [&sol](double x) { return -(0.5 * x * x + sol.phi_at(x)); }, sol.grid);
  r.cp_mu = 1.0 / r.gap.extrapolated();

  if (nu.has_d2log()) {
    double c = -kInf;
    for (double y : nu.grid(kDefaultNodes).nodes()) c = std::max(c, -nu.d2log_g(y));
    r.hessian_bound = c;
    if (1.0 + c > 0.0) r.sdb_holds = r.cp_mu <= 1.0 + c + 1e-3;
  }

  if (r.fisher_rho > 0.0) {
    const double delta = 1.0 - 2.0 * r.entropy_rho / r.fisher_rho;
    if (delta > 0.0 && delta < 1.0) {
      r.distcontrol_delta = delta;
      r.distcontrol_lhs = std::sqrt(r.w2_squared);
      r.distcontrol_rhs = (1.0 + std::sqrt(1.0 - delta)) / delta * w2(scaled_gaussian(1.0), nu);
      r.distcontrol_holds = r.distcontrol_lhs <= r.distcontrol_rhs * (1.0 + 1e-9);
    }
  }
  return r;
}

MomentReport moment_and_exp_checks(const MomentSolution& sol, const RelativeDensity& nu,
                                   std::span<const double> p_list) {
  MomentReport r;
  const double default_p[] = {1.0, 2.0, 3.0, 4.0};
  if (p_list.empty()) p_list = default_p;
  r.p.assign(p_list.begin(), p_list.end());
  const auto w = mu_weights(sol);
  for (double p : r.p) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      a += w[i] * std::pow(std::abs(sol.phi[i]), p);
      b += w[i] * std::pow(std::abs(sol.T[i] - sol.grid[i]), p);
    }
    r.phi_moments.push_back(a);
    r.dphi_moments.push_back(b);
    r.moments_finite = r.moments_finite && std::isfinite(a) && std::isfinite(b);
  }

  // Gaussian integrals over [-12, 12], where gamma carries all but ~1e-33 of its mass.
  const double reach = 12.0, bulk = 8.5;
  const Grid1D gg(-reach, reach, 4801);
  auto gamma_weight = [&](std::size_t i) {
    const double x = gg[i];
    return (i == 0 || i + 1 == gg.size() ? 0.5 : 1.0) * gg.spacing() *
           std::exp(-0.5 * x * x - 0.5 * kLog2Pi);
  };

  const auto sup = nu.metadata().sup_g;
  if (nu.compact()) {
    r.exp_reason = "compact_support";
    r.exp_note = "compact support: phi is not integrable against gamma";
  } else if (!sup) {
    r.exp_reason = "unbounded_g";
    r.exp_note = "sup g is not finite or not known";
  } else if (!(sol.grid.lo() <= -bulk && sol.grid.hi() >= bulk)) {
    r.exp_reason = "window_too_narrow";
    r.exp_note = "solution window does not cover the Gaussian bulk";
  } else {
    double lhs = 0.0, mean_phi = 0.0;
    for (std::size_t i = 0; i < gg.size(); ++i) {
      const double x = gg[i];
      if (!sol.contains(x)) continue;
      const double d = sol.T_at(x) - x;
      lhs += gamma_weight(i) * std::exp(0.5 * d * d);
      mean_phi += gamma_weight(i) * sol.phi_at(x);
    }
    r.exp_lhs = lhs;
    r.exp_rhs = *sup * std::exp(mean_phi);
    r.exp_holds = lhs <= *r.exp_rhs * (1.0 + 1e-6);
  }

  // psi(y) = Phi*(y) - y^2/2 + log(2 pi)/2 by the duality identity.
  const std::vector<double> Phis = conjugate_potential(sol, gg);
  std::vector<double> k(gg.size());
  for (double delta : {0.25, 0.5, 0.75, 1.0}) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < gg.size(); ++i) {
      const double y = gg[i];
      const double psi = Phis[i] - 0.5 * y * y + 0.5 * kLog2Pi;
      lhs += gamma_weight(i) * std::exp(-delta * psi);
      k[i] = 0.5 * y * y + delta * psi;
    }
    // (delta psi)^*(x) = sup_y (x y - k(y)) - x^2/2.
    const auto lk = legendre_transform(gg, k, gg, LegendreExtension::grid_only);
    double mean_conj = 0.0;
    for (std::size_t i = 0; i < gg.size(); ++i)
      mean_conj += gamma_weight(i) * (lk[i] - 0.5 * gg[i] * gg[i]);
    r.infconv_delta.push_back(delta);
    r.infconv_lhs.push_back(lhs);
    r.infconv_rhs.push_back(std::exp(mean_conj));
    r.infconv_holds = r.infconv_holds && lhs <= std::exp(mean_conj) * (1.0 + 1e-6);
  }
  return r;
}

}  // namespace gfi
