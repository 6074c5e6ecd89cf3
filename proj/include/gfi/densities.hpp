#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfi/numerics.hpp"

namespace gfi {

inline constexpr std::size_t kDefaultNodes = 4001;

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return x >= lo && x <= hi; }
  double width() const { return hi - lo; }
};

// Exact values known for a family; absent entries are computed numerically.
struct DensityMetadata {
  std::optional<double> mean;
  std::optional<double> variance;
  std::optional<double> poincare;
  std::optional<double> log_sobolev;
  std::optional<double> sup_g;
};

// Backend of a relative density. All logs are natural; log_g is relative to
// the standard Gaussian, log_cdf/log_sf refer to the measure nu = g * gamma.
class DensityModel {
 public:
  virtual ~DensityModel() = default;
  virtual double log_g(double x) const = 0;
  virtual double dlog_g(double x) const = 0;
  virtual bool has_d2log() const { return false; }
  virtual double d2log_g(double x) const;
  virtual double log_cdf(double x) const = 0;
  virtual double log_sf(double x) const = 0;
};

enum class Tail { lower, upper };

class RelativeDensity {
 public:
  RelativeDensity(std::shared_ptr<const DensityModel> model, Interval support, bool compact,
                  DensityMetadata meta, std::string label);

  const std::string& label() const { return label_; }
  // Effective support: outside it nu has negligible mass (or none, if compact).
  const Interval& support() const { return support_; }
  bool compact() const { return compact_; }
  const DensityMetadata& metadata() const { return meta_; }
  const std::shared_ptr<const DensityModel>& model() const { return model_; }

  double log_g(double x) const;
  double g(double x) const { return std::exp(log_g(x)); }
  double dlog_g(double x) const;
  bool has_d2log() const { return model_->has_d2log(); }
  double d2log_g(double x) const;

  // Lebesgue density of nu and its log-derivative.
  double log_rho(double x) const { return log_g(x) - 0.5 * x * x - 0.5 * kLog2Pi; }
  double rho(double x) const { return std::exp(log_rho(x)); }
  double dlog_rho(double x) const { return dlog_g(x) - x; }

  double log_cdf(double x) const;
  double log_sf(double x) const;
  double cdf(double x) const { return std::exp(log_cdf(x)); }
  double sf(double x) const { return std::exp(log_sf(x)); }

  double quantile(double p) const;
  // Solves log F(y) = log_p (lower) or log(1 - F(y)) = log_p (upper).
  double quantile_log(double log_p, Tail tail, std::optional<double> hint = {}) const;

  // Trapezoid rule for nu-expectations on the effective support; weights are
  // Lebesgue weights times rho.
  QuadratureRule rule(std::size_t nodes = kDefaultNodes) const;
  Grid1D grid(std::size_t nodes = kDefaultNodes) const;
  double expect(const Evaluator& f, std::size_t nodes = kDefaultNodes) const;

  double mean() const;
  double variance() const;

 private:
  void check_support(double x, const char* what) const;

  std::shared_ptr<const DensityModel> model_;
  Interval support_;
  bool compact_;
  DensityMetadata meta_;
  std::string label_;
};

// nu = N(0, 1/lambda).
RelativeDensity scaled_gaussian(double lambda);
RelativeDensity gaussian(double mean, double sigma);
RelativeDensity gaussian_mixture(std::span<const double> weights, std::span<const double> means,
                                 std::span<const double> sigmas,
                                 std::size_t nodes = kDefaultNodes);
// g proportional to exp(-a x^4 + tilt x).
RelativeDensity quartic(double a, double tilt = 0.0);
// g proportional to cosh(b x)^(-c) exp(tilt x).
RelativeDensity logcosh(double b, double c, double tilt = 0.0);
// nu uniform on [lo, hi].
RelativeDensity uniform(double lo, double hi);
// Grid-backed density; log g is a natural cubic spline through the samples
// (renormalized), with compact support equal to the grid interval.
RelativeDensity grid_density(const Grid1D& grid, std::span<const double> log_g_values);

// Log-Lebesgue density known up to a constant, with derivatives. Used for
// families without closed-form CDFs.
struct UnnormalizedLogDensity {
  std::function<double(double)> log_rho;
  std::function<double(double)> dlog_rho;
  std::function<double(double)> d2log_rho;  // may be empty
};
RelativeDensity tabulated_density(UnnormalizedLogDensity f, Interval support, bool compact,
                                  DensityMetadata meta, std::string label,
                                  std::size_t cells = 4000);
// Effective support of a log-density: where it is within `drop` of its maximum.
Interval effective_support(const std::function<double(double)>& log_rho, double center,
                           double drop = 85.0, double limit = 200.0);

// Translates nu so that its mean vanishes.
RelativeDensity recenter(const RelativeDensity& g);
// The measure of X + shift.
RelativeDensity translate(const RelativeDensity& g, double shift);

// sup g over the support when finite and attained in the interior.
std::optional<double> numeric_sup_g(const RelativeDensity& g);

struct CorpusEntry {
  std::string id;
  RelativeDensity density;
};
// Reference set: scaled Gaussians, three mixtures and two log-concave perturbations.
std::vector<CorpusEntry> standard_corpus();

}  // namespace gfi
