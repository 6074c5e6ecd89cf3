#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfi/densities.hpp"
#include "gfi/functionals.hpp"

namespace gfi {

struct SolverOptions {
  std::size_t nodes = kDefaultNodes;  // minimum grid size
  double max_step = 0.005;            // grid spacing cap
  double log_tail = -69.0;            // log of the tail mass left outside the window
  double pad = 0.25;                  // extra window on each side
  int max_iterations = 60;
};

// Solution of the one-dimensional Gaussian moment-measure problem: mu = e^{-phi} gamma is
// centered and T(x) = x + phi'(x) pushes mu forward to nu.
struct MomentSolution {
  Grid1D grid{-1.0, 1.0, 3};
  std::vector<double> phi;
  std::vector<double> T;
  std::vector<double> Tprime;
  std::vector<double> residual;  // |F_nu(T(x)) - F_mu(x)| per node

  double pushforward_residual = 0.0;
  double mass_error = 0.0;
  double barycenter_error = 0.0;
  double f_gamma = 0.0;
  double beta = 0.0;   // Phi at the left end of the window before translation
  double shift = 0.0;  // translation applied afterwards
  int iterations = 0;
  double match_jump = 0.0;  // |Phi_left - Phi_right| at the matching node

  // Euclidean potential x^2/2 + phi + log(2 pi)/2.
  double Phi(std::size_t i) const;
  double rho(std::size_t i) const { return std::exp(-phi[i]); }
  bool contains(double x) const { return x >= grid.lo() && x <= grid.hi(); }
  // Hermite interpolants; throw DomainError outside the window.
  double phi_at(double x) const;
  double T_at(double x) const;
  // Smallest T' on the grid; Phi is convex when this is >= 0.
  double min_curvature() const;

  // mu = e^{-phi} gamma as a grid-backed relative density.
  RelativeDensity density() const;
  void write_csv(std::ostream& out) const;
};

// Requires a centered nu. Throws DomainError for uncentered input and NumericalError when the
// shooting bracket cannot be found or does not converge.
MomentSolution solve_1d(const RelativeDensity& nu, const SolverOptions& options = {});

// -W2^2(rho gamma, nu)/2 + Ent rho.
double f_gamma(const RelativeDensity& rho, const RelativeDensity& nu,
               std::size_t nodes = kDefaultNodes);

// J(f) = log int e^{-f*} dx - int f dnu for f sampled on ygrid.
double j_functional(const Grid1D& ygrid, std::span<const double> f, const RelativeDensity& nu);

// Phi* sampled on ygrid.
std::vector<double> conjugate_potential(const MomentSolution& sol, const Grid1D& ygrid);

struct PerturbationMargin {
  double margin = kInf;  // smallest increase over the perturbation set
  double epsilon = 0.0;  // where it was attained
  int bump = -1;
};

// Gaussian bumps centred at the 0.1, 0.3, ..., 0.9 quantiles of `m`, width half its sd.
std::vector<Evaluator> standard_bumps(const RelativeDensity& m);
inline const double kPerturbationSizes[] = {0.05, -0.05, 0.01, -0.01};

// min over rho_eps ~ rho e^{eps h} (recentered) of f_gamma(rho_eps) - f_gamma(rho).
PerturbationMargin local_min_check(const MomentSolution& sol, const RelativeDensity& nu);
// min over f = Phi* + eps h of J(Phi*) - J(f).
PerturbationMargin j_max_check(const MomentSolution& sol, const RelativeDensity& nu);

struct AprioriReport {
  double w2_squared = 0.0;  // W2^2(nu, rho gamma)
  double f_gamma = 0.0;
  double fisher_g = 0.0;
  double entropy_rho = 0.0;
  double fisher_rho = 0.0;
  SpectralGap gap{};
  double cp_mu = 0.0;

  // Present when -(log g)'' is available; c is its maximum over the support.
  std::optional<double> hessian_bound;
  std::optional<bool> sdb_holds;  // C_P(mu) <= 1 + c + 1e-3

  // Present when Ent rho <= (1 - delta) I(rho)/2 for some delta in (0, 1).
  std::optional<double> distcontrol_delta;
  double distcontrol_lhs = 0.0;  // W2(rho gamma, nu)
  double distcontrol_rhs = 0.0;  // (1 + sqrt(1 - delta))/delta W2(nu, gamma)
  std::optional<bool> distcontrol_holds;
};
AprioriReport apriori_checks(const MomentSolution& sol, const RelativeDensity& nu);

struct MomentReport {
  std::vector<double> p;
  std::vector<double> phi_moments;    // int |phi|^p dmu
  std::vector<double> dphi_moments;   // int |phi'|^p dmu
  bool moments_finite = true;

  // Exponential integrability: int e^{phi'^2/2} dgamma <= sup g e^{int phi dgamma}.
  std::optional<double> exp_lhs;
  std::optional<double> exp_rhs;
  std::optional<bool> exp_holds;
  std::string exp_reason;  // code when the check was skipped
  std::string exp_note;

  // int e^{-f} dgamma <= e^{int f* dgamma} for f = delta psi.
  std::vector<double> infconv_delta;
  std::vector<double> infconv_lhs;
  std::vector<double> infconv_rhs;
  bool infconv_holds = true;
};
MomentReport moment_and_exp_checks(const MomentSolution& sol, const RelativeDensity& nu,
                                   std::span<const double> p_list = {});

}  // namespace gfi
