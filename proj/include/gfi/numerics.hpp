#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfi {

using Evaluator = std::function<double(double)>;

// Raised when a precondition on user-supplied data is violated.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an input lacks data that a computation needs, such as second
// derivatives of a grid-backed density.
class UnavailableError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Raised when a computation cannot produce a trustworthy value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kLog2Pi = 1.8378770664093454836;

class Grid1D {
 public:
  Grid1D(double lo, double hi, std::size_t n);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double operator[](std::size_t i) const;
  std::vector<double> nodes() const;
  // Same interval, spacing halved (2n-1 nodes).
  Grid1D refined() const { return Grid1D(lo_, hi_, 2 * n_ - 1); }

 private:
  double lo_, hi_;
  std::size_t n_;
  double h_;
};

enum class Measure { gaussian, lebesgue };

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  Measure measure = Measure::lebesgue;

  std::size_t size() const { return nodes.size(); }
  double sum(const Evaluator& f) const;
};

// Probabilists' Gauss-Hermite rule for the standard Gaussian measure.
// Nodes whose weights underflow double precision are dropped.
QuadratureRule gauss_hermite(int n);

// Sum of w_i f(x_i); throws NumericalError naming the node if f is not finite.
double integrate_gamma(const Evaluator& f, const QuadratureRule& rule);

// Gauss-Legendre nodes/weights on [-1, 1].
QuadratureRule gauss_legendre(int n);

double trapezoid(std::span<const double> values, double h);
// Composite Simpson; needs an odd number of samples.
double simpson(std::span<const double> values, double h);

// Trapezoid rule on a grid as a Lebesgue quadrature rule.
QuadratureRule trapezoid_rule(const Grid1D& grid);

// Integral of |h(x)| w(x) over the grid interval, splitting cells at sign
// changes of h and using 5-point Gauss-Legendre on each piece.
double integrate_abs(const Evaluator& h, const Evaluator& w, const Grid1D& cells);

// Finds a root of f in [a, b] (f(a), f(b) of opposite sign) by Brent's method.
double brent_root(const Evaluator& f, double a, double b, double tol = 1e-14);

double log_sum_exp(std::span<const double> v);
// log Phi(z) for the standard normal CDF, accurate deep into the lower tail.
double log_ndtr(double z);
double ndtr(double z);

// Cubic Hermite interpolation on [x0, x1].
double hermite_value(double x0, double x1, double f0, double f1, double d0, double d1,
                     double x);

enum class LegendreExtension {
  // Recession extension of the hull: +inf outside the slope range.
  recession,
  // f = +inf off the grid: finite everywhere.
  grid_only,
};

// Discrete Legendre transform f*(y) = sup_x (x y - f(x)) by a hull scan.
// x must be strictly increasing, y non-decreasing. +inf entries are kInf.
std::vector<double> legendre_transform(std::span<const double> x, std::span<const double> f,
                                       std::span<const double> y,
                                       LegendreExtension ext = LegendreExtension::recession);
std::vector<double> legendre_transform(const Grid1D& xgrid, std::span<const double> f,
                                       const Grid1D& ygrid,
                                       LegendreExtension ext = LegendreExtension::recession);

struct SpectralGap {
  double lambda1;          // on the supplied grid
  double lambda1_refined;  // on the refined grid
  bool coarse;             // refinement changed lambda1 by more than 1e-4

  // Richardson value from the two second-order estimates.
  double extrapolated() const { return (4.0 * lambda1_refined - lambda1) / 3.0; }
};

// First nonzero Neumann eigenvalue of f -> -f'' + W'f' with W = -logdensity,
// by a finite-volume discretization and Sturm-sequence bisection.
SpectralGap spectral_gap(const Evaluator& logdensity, const Grid1D& grid);

namespace detail {
double second_neumann_eigenvalue(const Evaluator& logdensity, const Grid1D& grid);
}

}  // namespace gfi
