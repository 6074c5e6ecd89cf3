#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gfi/densities.hpp"

namespace gfi {

struct PlanOptions {
  std::size_t nodes = kDefaultNodes;  // potential tables and quadrature
  bool potentials = true;             // build phi and psi tables
  bool validate = true;               // monotonicity and pushforward checks on [-6, 6]
};

// Monotone optimal map between two 1D measures mu = g_mu * gamma and
// nu = g_nu * gamma, with Gaussian-frame potentials T(x) = x + phi'(x) and
// S(y) = y + psi'(y), normalized so that phi'^2/2 + phi + psi(T) = 0.
class TransportPlan1D {
 public:
  TransportPlan1D(RelativeDensity source, RelativeDensity target, const PlanOptions& options = {});

  const RelativeDensity& source() const { return src_; }
  const RelativeDensity& target() const { return tgt_; }

  double T(double x, std::optional<double> hint = {}) const;
  double Tprime(double x) const;
  double Tsecond(double x) const;
  // Inverse map S = T^{-1}.
  double S(double y, std::optional<double> hint = {}) const;

  bool has_potentials() const { return static_cast<bool>(tables_); }
  double phi(double x) const;
  double phi_prime(double x) const { return T(x) - x; }
  double phi_second(double x) const { return Tprime(x) - 1.0; }
  double phi_third(double x) const { return Tsecond(x); }
  double psi(double y) const;
  double psi_prime(double y) const { return S(y) - y; }

  // Squared W2 between source and target.
  double cost_w2() const { return cost_w2_; }
  // sup over [-6, 6] of |F_target(T(x)) - F_source(x)|.
  // NaN when the plan was built without validation.
  double pushforward_residual() const { return pushforward_residual_; }

  // T, T' and T'' at the nodes of the source quadrature rule, sequentially.
  struct Samples {
    QuadratureRule rule;
    std::vector<double> t, tp, tpp;
  };
  Samples sample(std::size_t nodes = kDefaultNodes) const;

 private:
  struct Tables;
  RelativeDensity src_, tgt_;
  std::shared_ptr<const Tables> tables_;
  double cost_w2_ = 0.0;
  double pushforward_residual_ = 0.0;
};

TransportPlan1D monotone_map(const RelativeDensity& mu, const RelativeDensity& nu,
                             const PlanOptions& options = {});

// Squared and plain Wasserstein-2, Wasserstein-1 (via the monotone map).
double w2_squared(const RelativeDensity& mu, const RelativeDensity& nu);
double w2(const RelativeDensity& mu, const RelativeDensity& nu);
double w1(const RelativeDensity& mu, const RelativeDensity& nu);
double w1(const TransportPlan1D& plan);
// Cost for sum_i |x_i - y_i| between product measures: sum of coordinate w1.
double w11_product(std::span<const TransportPlan1D> plans);
double w2_squared_product(std::span<const TransportPlan1D> plans);

// sup over test nodes in [-6, 6] of |phi'^2/2 + phi + psi(T)|.
double duality_residual(const TransportPlan1D& plan);

struct DiscreteMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;
};

struct DiscretePlan {
  DiscreteMeasure source, target;
  std::vector<double> coupling;  // row-major, source x target
  double cost = 0.0;
  // Dual certificate: u_i + v_j <= c_ij with equality on the support.
  std::vector<double> u, v;

  double at(std::size_t i, std::size_t j) const { return coupling[i * target.atoms.size() + j]; }
};

using CostFunction = std::function<double(double, double)>;

// Exact optimal coupling by the network simplex method.
DiscretePlan lp_transport(const DiscreteMeasure& source, const DiscreteMeasure& target,
                          const CostFunction& cost);

// n equal-mass atoms at the midpoint quantiles (k + 1/2)/n.
DiscreteMeasure quantile_atoms(const RelativeDensity& g, std::size_t n);

// c_a(d) = a^2 (1 - r + r log r), r = d^2/a^2.
double ka_cost_function(double a, double d);

struct KaCost {
  double value;
  double a;         // W2(nu, gamma)
  bool degenerate;  // a = 0, value set to 0 by convention
};
KaCost k_a_cost(const RelativeDensity& nu, std::size_t atoms = 256);

}  // namespace gfi
