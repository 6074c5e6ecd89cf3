#include "gfi/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gfi {

double DensityModel::d2log_g(double) const {
  throw UnavailableError("second log-derivative unavailable for this density");
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

// Numerically stable log(cosh(u)).
double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

class MixtureModel final : public DensityModel {
 public:
  MixtureModel(std::vector<double> w, std::vector<double> m, std::vector<double> s)
      : logw_(w.size()), m_(std::move(m)), s_(std::move(s)) {
    for (std::size_t i = 0; i < w.size(); ++i) logw_[i] = std::log(w[i]);
  }

  double log_g(double x) const override {
    if (logw_.size() == 1) return component_log_g(0, x);
    std::vector<double> t(logw_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = logw_[i] + component_log_g(i, x);
    return log_sum_exp(t);
  }

  double dlog_g(double x) const override {
    double d1, d2;
    derivatives(x, d1, d2);
    return d1 + x;
  }

  bool has_d2log() const override { return true; }

  double d2log_g(double x) const override {
    double d1, d2;
    derivatives(x, d1, d2);
    return d2 + 1.0;
  }

  double log_cdf(double x) const override { return log_tail(x, false); }
  double log_sf(double x) const override { return log_tail(x, true); }

 private:
  // log of (dN(m, s^2)/dgamma) written to avoid cancellation for large |x|.
  double component_log_g(std::size_t i, double x) const {
    const double s2 = s_[i] * s_[i], m = m_[i];
    return -std::log(s_[i]) - 0.5 * x * x * (1.0 - s2) / s2 + m * x / s2 - 0.5 * m * m / s2;
  }

  // First and second derivatives of the Lebesgue log-density.
  void derivatives(double x, double& d1, double& d2) const {
    const std::size_t k = logw_.size();
    std::vector<double> t(k);
    for (std::size_t i = 0; i < k; ++i) t[i] = logw_[i] + component_log_g(i, x);
    const double lse = log_sum_exp(t);
    double mean_a = 0.0, mean_a2 = 0.0, mean_c = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double r = std::exp(t[i] - lse);
      const double inv = 1.0 / (s_[i] * s_[i]);
      const double a = -(x - m_[i]) * inv;
      mean_a += r * a;
      mean_a2 += r * a * a;
      mean_c -= r * inv;
    }
    d1 = mean_a;
    d2 = mean_c + mean_a2 - mean_a * mean_a;
  }

  double log_tail(double x, bool upper) const {
    std::vector<double> t(logw_.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double z = (x - m_[i]) / s_[i];
      t[i] = logw_[i] + log_ndtr(upper ? -z : z);
    }
    return log_sum_exp(t);
  }

  std::vector<double> logw_, m_, s_;
};

// CDF tables for a density known through an unnormalized log-density.
class TabulatedModel final : public DensityModel {
 public:
  TabulatedModel(UnnormalizedLogDensity f, Interval support, bool compact, std::size_t cells)
      : f_(std::move(f)), a_(support.lo), b_(support.hi), compact_(compact), n_(cells) {
    if (n_ < 8) throw DomainError("tabulated density: too few cells");
    h_ = (b_ - a_) / static_cast<double>(n_);
    lr_.resize(n_ + 1);
    for (std::size_t k = 0; k <= n_; ++k) {
      lr_[k] = f_.log_rho(node(k));
      if (std::isnan(lr_[k]) || lr_[k] == kInf)
        throw NumericalError("tabulated density: invalid log-density at x=" + fmt(node(k)));
    }
    const double mx = *std::max_element(lr_.begin(), lr_.end());
    if (!std::isfinite(mx)) throw NumericalError("tabulated density: density vanishes on the support");

    static const QuadratureRule gl = gauss_legendre(8);
    std::vector<long double> cell(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      long double s = 0.0L;
      const double c = node(k) + 0.5 * h_;
      for (std::size_t q = 0; q < gl.size(); ++q)
        s += gl.weights[q] * std::exp(f_.log_rho(c + 0.5 * h_ * gl.nodes[q]) - mx);
      cell[k] = s * 0.5L * h_;
    }
    long double tail_lo = 0.0L, tail_hi = 0.0L;
    if (!compact_) {
      const double slo = f_.dlog_rho(a_), shi = -f_.dlog_rho(b_);
      if (slo > 0) tail_lo = std::exp(lr_.front() - mx) / slo;
      if (shi > 0) tail_hi = std::exp(lr_.back() - mx) / shi;
    }
    std::vector<long double> lower(n_ + 1), upper(n_ + 1);
    lower[0] = tail_lo;
    for (std::size_t k = 0; k < n_; ++k) lower[k + 1] = lower[k] + cell[k];
    upper[n_] = tail_hi;
    for (std::size_t k = n_; k-- > 0;) upper[k] = upper[k + 1] + cell[k];
    const long double total = lower[n_] + tail_hi;
    log_norm_ = mx + std::log(static_cast<double>(total));
    log_f_.resize(n_ + 1);
    log_s_.resize(n_ + 1);
    for (std::size_t k = 0; k <= n_; ++k) {
      log_f_[k] = lower[k] > 0 ? std::log(static_cast<double>(lower[k] / total)) : -kInf;
      log_s_[k] = upper[k] > 0 ? std::log(static_cast<double>(upper[k] / total)) : -kInf;
    }
  }

  double log_g(double x) const override { return log_rho(x) + 0.5 * x * x + 0.5 * kLog2Pi; }
  double dlog_g(double x) const override { return f_.dlog_rho(x) + x; }
  bool has_d2log() const override { return static_cast<bool>(f_.d2log_rho); }
  double d2log_g(double x) const override {
    if (!f_.d2log_rho) return DensityModel::d2log_g(x);
    return f_.d2log_rho(x) + 1.0;
  }

  double log_cdf(double x) const override { return tail_value(x, false); }
  double log_sf(double x) const override { return tail_value(x, true); }

 private:
  double node(std::size_t k) const { return k == n_ ? b_ : a_ + static_cast<double>(k) * h_; }
  double log_rho(double x) const { return f_.log_rho(x) - log_norm_; }

  // log F (upper=false) or log(1-F) (upper=true).
  double tail_value(double x, bool upper) const {
    if (x <= a_) {
      if (upper) return std::log1p(-std::exp(tail_value(x, false)));
      if (compact_) return -kInf;
      const double s = f_.dlog_rho(x);
      return s > 0 ? log_rho(x) - std::log(s) : log_f_.front();
    }
    if (x >= b_) {
      if (!upper) return std::log1p(-std::exp(tail_value(x, true)));
      if (compact_) return -kInf;
      const double s = -f_.dlog_rho(x);
      return s > 0 ? log_rho(x) - std::log(s) : log_s_.back();
    }
    const std::size_t k = std::min(n_ - 1, static_cast<std::size_t>((x - a_) / h_));
    // Interpolate whichever side is smaller on this cell; its log is well conditioned.
    const double lower_max = std::max(log_f_[k], log_f_[k + 1]);
    const double upper_max = std::max(log_s_[k], log_s_[k + 1]);
    const bool use_upper = upper_max < lower_max;
    const double v = interpolate(k, x, use_upper);
    return use_upper == upper ? v : std::log1p(-std::exp(v));
  }

  double interpolate(std::size_t k, double x, bool upper) const {
    const std::vector<double>& tab = upper ? log_s_ : log_f_;
    const double l0 = tab[k], l1 = tab[k + 1];
    const double r0 = lr_[k] - log_norm_, r1 = lr_[k + 1] - log_norm_;
    const double sign = upper ? -1.0 : 1.0;
    if (l0 > -600 && l1 > -600) {
      const double d0 = sign * std::exp(r0 - l0), d1 = sign * std::exp(r1 - l1);
      return hermite_value(node(k), node(k + 1), l0, l1, d0, d1, x);
    }
    // Near a compact endpoint: interpolate the probability itself.
    const double p = hermite_value(node(k), node(k + 1), std::exp(l0), std::exp(l1),
                                   sign * std::exp(r0), sign * std::exp(r1), x);
    return p > 0 ? std::log(p) : -kInf;
  }

  UnnormalizedLogDensity f_;
  double a_, b_;
  bool compact_;
  std::size_t n_;
  double h_;
  double log_norm_ = 0.0;
  std::vector<double> lr_, log_f_, log_s_;
};

class TranslatedModel final : public DensityModel {
 public:
  TranslatedModel(std::shared_ptr<const DensityModel> base, double shift)
      : base_(std::move(base)), s_(shift) {}
  double log_g(double x) const override { return base_->log_g(x - s_) + s_ * x - 0.5 * s_ * s_; }
  double dlog_g(double x) const override { return base_->dlog_g(x - s_) + s_; }
  bool has_d2log() const override { return base_->has_d2log(); }
  double d2log_g(double x) const override { return base_->d2log_g(x - s_); }
  double log_cdf(double x) const override { return base_->log_cdf(x - s_); }
  double log_sf(double x) const override { return base_->log_sf(x - s_); }

 private:
  std::shared_ptr<const DensityModel> base_;
  double s_;
};

class UniformModel final : public DensityModel {
 public:
  UniformModel(double lo, double hi) : lo_(lo), hi_(hi) {}
  double log_g(double x) const override { return -std::log(hi_ - lo_) + 0.5 * x * x + 0.5 * kLog2Pi; }
  double dlog_g(double x) const override { return x; }
  bool has_d2log() const override { return true; }
  double d2log_g(double) const override { return 1.0; }
  double log_cdf(double x) const override {
    if (x <= lo_) return -kInf;
    if (x >= hi_) return 0.0;
    return std::log((x - lo_) / (hi_ - lo_));
  }
  double log_sf(double x) const override {
    if (x <= lo_) return 0.0;
    if (x >= hi_) return -kInf;
    return std::log((hi_ - x) / (hi_ - lo_));
  }

 private:
  double lo_, hi_;
};

// Natural cubic spline through uniformly spaced samples.
class CubicSpline {
 public:
  CubicSpline(const Grid1D& grid, std::span<const double> y)
      : lo_(grid.lo()), h_(grid.spacing()), y_(y.begin(), y.end()), m_(y.size(), 0.0) {
    const std::size_t n = y.size();
    // Tridiagonal solve for second derivatives (Thomas algorithm).
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h_ * h_);
      const double denom = 4.0 - c[i - 1];
      c[i] = 1.0 / denom;
      d[i] = (rhs - d[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 1;) m_[i] = d[i] - c[i] * m_[i + 1];
  }

  void eval(double x, double& v, double& d1, double& d2) const {
    const std::size_t n = y_.size();
    std::size_t k = static_cast<std::size_t>(std::clamp((x - lo_) / h_, 0.0, static_cast<double>(n - 2)));
    k = std::min(k, n - 2);
    const double t = x - (lo_ + static_cast<double>(k) * h_);
    const double a = y_[k], mk = m_[k], mk1 = m_[k + 1];
    const double b = (y_[k + 1] - y_[k]) / h_ - h_ * (2.0 * mk + mk1) / 6.0;
    const double e = (mk1 - mk) / (6.0 * h_);
    v = a + t * (b + t * (0.5 * mk + t * e));
    d1 = b + t * (mk + 3.0 * t * e);
    d2 = mk + 6.0 * t * e;
  }

 private:
  double lo_, h_;
  std::vector<double> y_, m_;
};

}  // namespace

RelativeDensity::RelativeDensity(std::shared_ptr<const DensityModel> model, Interval support,
                                 bool compact, DensityMetadata meta, std::string label)
    : model_(std::move(model)), support_(support), compact_(compact), meta_(meta),
      label_(std::move(label)) {
  if (!model_) throw DomainError("RelativeDensity: null model");
  if (!(support.lo < support.hi)) throw DomainError("RelativeDensity: empty support");
}

void RelativeDensity::check_support(double x, const char* what) const {
  if (compact_ && !support_.contains(x)) {
    std::ostringstream msg;
    msg << label_ << ": " << what << " evaluated at x=" << x << " outside the compact support ["
        << support_.lo << ", " << support_.hi << "]";
    throw DomainError(msg.str());
  }
}

double RelativeDensity::log_g(double x) const {
  check_support(x, "log_g");
  return model_->log_g(x);
}

double RelativeDensity::dlog_g(double x) const {
  check_support(x, "dlog_g");
  return model_->dlog_g(x);
}

double RelativeDensity::d2log_g(double x) const {
  check_support(x, "d2log_g");
  return model_->d2log_g(x);
}

double RelativeDensity::log_cdf(double x) const { return model_->log_cdf(x); }
double RelativeDensity::log_sf(double x) const { return model_->log_sf(x); }

double RelativeDensity::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: p must lie in (0, 1), got " + fmt(p));
  return p <= 0.5 ? quantile_log(std::log(p), Tail::lower) : quantile_log(std::log1p(-p), Tail::upper);
}

double RelativeDensity::quantile_log(double log_p, Tail tail, std::optional<double> hint) const {
  if (!(log_p < 0.0)) throw DomainError("quantile_log: log-probability must be negative");
  const bool lower = tail == Tail::lower;
  // Increasing residual in y.
  auto resid = [&](double y) {
    const double l = lower ? model_->log_cdf(y) : model_->log_sf(y);
    return lower ? l - log_p : log_p - l;
  };
  auto slope = [&](double y) {
    const double l = lower ? model_->log_cdf(y) : model_->log_sf(y);
    return std::exp(model_->log_g(y) - 0.5 * y * y - 0.5 * kLog2Pi - l);
  };

  const double width = support_.width();
  double y = hint.value_or(std::clamp(0.0, support_.lo, support_.hi));
  if (!std::isfinite(y)) y = 0.5 * (support_.lo + support_.hi);
  double r = resid(y);
  if (r == 0.0) return y;
  double lo, hi;
  double step = hint ? 1e-3 * width : 0.25 * width;
  if (r < 0) {
    lo = y;
    hi = y + step;
    int it = 0;
    while (resid(hi) < 0) {
      if (compact_ && hi >= support_.hi) return support_.hi;
      lo = hi;
      step *= 2.0;
      hi = compact_ ? std::min(hi + step, support_.hi) : hi + step;
      if (++it > 200) throw NumericalError("quantile: bracket expansion failed");
    }
  } else {
    hi = y;
    lo = y - step;
    int it = 0;
    while (resid(lo) > 0) {
      if (compact_ && lo <= support_.lo) return support_.lo;
      hi = lo;
      step *= 2.0;
      lo = compact_ ? std::max(lo - step, support_.lo) : lo - step;
      if (++it > 200) throw NumericalError("quantile: bracket expansion failed");
    }
  }
  y = std::clamp(y, lo, hi);
  for (int it = 0; it < 200; ++it) {
    r = resid(y);
    if (r == 0.0) return y;
    if (r < 0) lo = y;
    else hi = y;
    const double d = slope(y);
    double next = y - r / d;
    if (!std::isfinite(next) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 2e-16 * std::max(1.0, std::abs(y))) return next;
    if (hi - lo <= 4e-16 * std::max(1.0, std::abs(y))) return 0.5 * (lo + hi);
    y = next;
  }
  throw NumericalError("quantile: Newton iteration did not converge");
}

Grid1D RelativeDensity::grid(std::size_t nodes) const { return Grid1D(support_.lo, support_.hi, nodes); }

QuadratureRule RelativeDensity::rule(std::size_t nodes) const {
  QuadratureRule r = trapezoid_rule(grid(nodes));
  for (std::size_t i = 0; i < r.size(); ++i) r.weights[i] *= rho(r.nodes[i]);
  return r;
}

double RelativeDensity::expect(const Evaluator& f, std::size_t nodes) const {
  const QuadratureRule r = rule(nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.weights[i] == 0.0) continue;
    const double v = f(r.nodes[i]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << label_ << ": non-finite integrand " << v << " at x=" << r.nodes[i];
      throw NumericalError(msg.str());
    }
    s += r.weights[i] * v;
  }
  return s;
}

double RelativeDensity::mean() const {
  if (meta_.mean) return *meta_.mean;
  return expect([](double x) { return x; });
}

double RelativeDensity::variance() const {
  if (meta_.variance) return *meta_.variance;
  const double m = mean();
  return expect([m](double x) { return (x - m) * (x - m); });
}

std::optional<double> numeric_sup_g(const RelativeDensity& g) {
  const Grid1D grid = g.grid(4001);
  std::size_t best = 0;
  double bestv = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = g.log_g(grid[i]);
    if (v > bestv) {
      bestv = v;
      best = i;
    }
  }
  if (best == 0 || best + 1 == grid.size()) return std::nullopt;
  // Golden-section refinement of the interior maximum.
  double a = grid[best - 1], b = grid[best + 1];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = g.log_g(c), fd = g.log_g(d);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - phi * (b - a);
      fc = g.log_g(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + phi * (b - a);
      fd = g.log_g(d);
    }
  }
  return std::exp(std::max({bestv, fc, fd}));
}

RelativeDensity scaled_gaussian(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("scaled_gaussian: lambda must be positive, got " + fmt(lambda));
  const double s = 1.0 / std::sqrt(lambda);
  auto model = std::make_shared<MixtureModel>(std::vector<double>{1.0}, std::vector<double>{0.0},
                                              std::vector<double>{s});
  DensityMetadata meta;
  meta.mean = 0.0;
  meta.variance = 1.0 / lambda;
  meta.poincare = 1.0 / lambda;
  meta.log_sobolev = 2.0 / lambda;
  if (lambda >= 1.0) meta.sup_g = std::sqrt(lambda);
  return RelativeDensity(model, {-11.5 * s, 11.5 * s}, false, meta,
                         "scaled_gaussian(lambda=" + fmt(lambda) + ")");
}

RelativeDensity gaussian(double mean, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mean))
    throw DomainError("gaussian: need finite mean and sigma > 0");
  auto model = std::make_shared<MixtureModel>(std::vector<double>{1.0}, std::vector<double>{mean},
                                              std::vector<double>{sigma});
  DensityMetadata meta;
  meta.mean = mean;
  meta.variance = sigma * sigma;
  meta.poincare = sigma * sigma;
  meta.log_sobolev = 2.0 * sigma * sigma;
  if (sigma < 1.0) {
    const double s2 = sigma * sigma, x = mean / (1.0 - s2);
    meta.sup_g = std::exp(-std::log(sigma) - 0.5 * x * x * (1.0 - s2) / s2 + mean * x / s2 -
                          0.5 * mean * mean / s2);
  } else if (sigma == 1.0 && mean == 0.0) {
    meta.sup_g = 1.0;
  }
  return RelativeDensity(model, {mean - 11.5 * sigma, mean + 11.5 * sigma}, false, meta,
                         "gaussian(mean=" + fmt(mean) + ",sigma=" + fmt(sigma) + ")");
}

RelativeDensity gaussian_mixture(std::span<const double> weights, std::span<const double> means,
                                 std::span<const double> sigmas, std::size_t nodes) {
  const std::size_t k = weights.size();
  if (k == 0 || means.size() != k || sigmas.size() != k)
    throw DomainError("gaussian_mixture: weights, means and sigmas must have equal nonzero length");
  double wsum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(weights[i] > 0.0)) throw DomainError("gaussian_mixture: weights must be positive");
    if (!(sigmas[i] > 0.0)) throw DomainError("gaussian_mixture: sigmas must be positive");
    if (!std::isfinite(means[i])) throw DomainError("gaussian_mixture: means must be finite");
    wsum += weights[i];
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw DomainError("gaussian_mixture: weights must sum to 1");

  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < k; ++i) {
    lo = std::min(lo, means[i] - 11.5 * sigmas[i]);
    hi = std::max(hi, means[i] + 11.5 * sigmas[i]);
  }
  const double spacing = (hi - lo) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < k; ++i)
    if (sigmas[i] < 4.0 * spacing)
      throw DomainError("gaussian_mixture: component sigma=" + fmt(sigmas[i]) +
                        " is below 4x the quadrature spacing " + fmt(spacing));

  std::vector<double> w(weights.begin(), weights.end()), m(means.begin(), means.end()),
      s(sigmas.begin(), sigmas.end());
  DensityMetadata meta;
  double mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mean += w[i] * m[i];
    second += w[i] * (s[i] * s[i] + m[i] * m[i]);
  }
  meta.mean = mean;
  meta.variance = second - mean * mean;
  if (k == 1) {
    meta.poincare = s[0] * s[0];
    meta.log_sobolev = 2.0 * s[0] * s[0];
  }
  bool bounded = true;
  for (std::size_t i = 0; i < k; ++i)
    if (!(s[i] < 1.0 || (s[i] == 1.0 && m[i] == 0.0))) bounded = false;

  std::ostringstream label;
  label << "mixture(";
  for (std::size_t i = 0; i < k; ++i)
    label << (i ? ";" : "") << fmt(w[i]) << "*N(" << fmt(m[i]) << "," << fmt(s[i]) << "^2)";
  label << ")";
  auto model = std::make_shared<MixtureModel>(w, m, s);
  RelativeDensity out(model, {lo, hi}, false, meta, label.str());
  if (bounded) {
    meta.sup_g = numeric_sup_g(out);
    out = RelativeDensity(model, {lo, hi}, false, meta, label.str());
  }
  return out;
}

Interval effective_support(const std::function<double(double)>& log_rho, double center, double drop,
                           double limit) {
  double mx = log_rho(center);
  const double step = 0.02;
  double lo = center, hi = center;
  for (double x = center; x > center - limit; x -= step) {
    const double v = log_rho(x);
    mx = std::max(mx, v);
    lo = x;
    if (v < mx - drop) break;
  }
  for (double x = center; x < center + limit; x += step) {
    const double v = log_rho(x);
    mx = std::max(mx, v);
    hi = x;
    if (v < mx - drop) break;
  }
  if (log_rho(lo) > mx - drop || log_rho(hi) > mx - drop)
    throw NumericalError("effective_support: density does not decay within the search limit");
  return {lo, hi};
}

RelativeDensity tabulated_density(UnnormalizedLogDensity f, Interval support, bool compact,
                                  DensityMetadata meta, std::string label, std::size_t cells) {
  auto model = std::make_shared<TabulatedModel>(std::move(f), support, compact, cells);
  return RelativeDensity(model, support, compact, meta, std::move(label));
}

RelativeDensity quartic(double a, double tilt) {
  if (!(a > 0.0)) throw DomainError("quartic: a must be positive");
  UnnormalizedLogDensity f{
      [a, tilt](double x) { return -a * x * x * x * x + tilt * x - 0.5 * x * x; },
      [a, tilt](double x) { return -4.0 * a * x * x * x + tilt - x; },
      [a](double x) { return -12.0 * a * x * x - 1.0; }};
  const Interval sup = effective_support(f.log_rho, 0.0);
  DensityMetadata meta;
  if (tilt == 0.0) meta.mean = 0.0;
  RelativeDensity out = tabulated_density(f, sup, false, meta,
                                          "quartic(a=" + fmt(a) + ",tilt=" + fmt(tilt) + ")");
  meta.sup_g = numeric_sup_g(out);
  return RelativeDensity(out.model(), sup, false, meta, out.label());
}

RelativeDensity logcosh(double b, double c, double tilt) {
  if (!(b > 0.0) || !(c > 0.0)) throw DomainError("logcosh: b and c must be positive");
  UnnormalizedLogDensity f{
      [b, c, tilt](double x) { return -c * log_cosh(b * x) + tilt * x - 0.5 * x * x; },
      [b, c, tilt](double x) { return -c * b * std::tanh(b * x) + tilt - x; },
      [b, c](double x) {
        const double sech = 1.0 / std::cosh(b * x);
        return -c * b * b * sech * sech - 1.0;
      }};
  const Interval sup = effective_support(f.log_rho, tilt);
  DensityMetadata meta;
  if (tilt == 0.0) meta.mean = 0.0;
  RelativeDensity out = tabulated_density(
      f, sup, false, meta, "logcosh(b=" + fmt(b) + ",c=" + fmt(c) + ",tilt=" + fmt(tilt) + ")");
  meta.sup_g = numeric_sup_g(out);
  return RelativeDensity(out.model(), sup, false, meta, out.label());
}

RelativeDensity uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("uniform: need finite lo < hi");
  DensityMetadata meta;
  meta.mean = 0.5 * (lo + hi);
  meta.variance = (hi - lo) * (hi - lo) / 12.0;
  return RelativeDensity(std::make_shared<UniformModel>(lo, hi), {lo, hi}, true, meta,
                         "uniform(" + fmt(lo) + "," + fmt(hi) + ")");
}

RelativeDensity grid_density(const Grid1D& grid, std::span<const double> log_g_values) {
  if (log_g_values.size() != grid.size()) throw DomainError("grid_density: size mismatch");
  for (double v : log_g_values)
    if (!std::isfinite(v)) throw DomainError("grid_density: log g values must be finite");
  auto spline = std::make_shared<CubicSpline>(grid, log_g_values);
  UnnormalizedLogDensity f{
      [spline](double x) {
        double v, d1, d2;
        spline->eval(x, v, d1, d2);
        return v - 0.5 * x * x;
      },
      [spline](double x) {
        double v, d1, d2;
        spline->eval(x, v, d1, d2);
        return d1 - x;
      },
      {}};
  const std::size_t cells = std::max<std::size_t>(8, 4 * (grid.size() - 1));
  return tabulated_density(f, {grid.lo(), grid.hi()}, true, {}, "grid_density", cells);
}

RelativeDensity translate(const RelativeDensity& g, double shift) {
  if (!std::isfinite(shift)) throw DomainError("translate: shift must be finite");
  DensityMetadata meta = g.metadata();
  if (meta.mean) meta.mean = *meta.mean + shift;
  const bool had_sup = meta.sup_g.has_value();
  meta.sup_g.reset();
  auto model = std::make_shared<TranslatedModel>(g.model(), shift);
  const Interval sup{g.support().lo + shift, g.support().hi + shift};
  RelativeDensity out(model, sup, g.compact(), meta, g.label());
  if (had_sup) {
    meta.sup_g = numeric_sup_g(out);
    out = RelativeDensity(model, sup, g.compact(), meta, g.label());
  }
  return out;
}

RelativeDensity recenter(const RelativeDensity& g) {
  const double m = g.expect([](double x) { return x; });
  if (!std::isfinite(m)) throw DomainError("recenter: first moment is not finite");
  if (std::abs(m) <= 1e-13 * std::max(1.0, std::sqrt(g.variance()))) return g;
  RelativeDensity out = translate(g, -m);
  DensityMetadata meta = out.metadata();
  meta.mean = 0.0;
  return RelativeDensity(out.model(), out.support(), out.compact(), meta, out.label());
}

std::vector<CorpusEntry> standard_corpus() {
  std::vector<CorpusEntry> out;
  out.push_back({"scaled_gaussian_4", scaled_gaussian(4.0)});
  out.push_back({"scaled_gaussian_2", scaled_gaussian(2.0)});
  out.push_back({"scaled_gaussian_1", scaled_gaussian(1.0)});
  out.push_back({"scaled_gaussian_0.5", scaled_gaussian(0.5)});
  out.push_back({"scaled_gaussian_0.25", scaled_gaussian(0.25)});
  const double w[] = {0.5, 0.5}, m[] = {-1.0, 1.0};
  const double s08[] = {0.8, 0.8}, s1[] = {1.0, 1.0};
  out.push_back({"mixture_sym_0.8", gaussian_mixture(w, m, s08)});
  out.push_back({"mixture_sym_1", gaussian_mixture(w, m, s1)});
  const double wa[] = {0.3, 0.7}, ma[] = {-1.4, 0.6}, sa[] = {0.7, 0.9};
  out.push_back({"mixture_asym", gaussian_mixture(wa, ma, sa)});
  out.push_back({"quartic", quartic(1.0 / 12.0)});
  out.push_back({"logcosh_tilted", recenter(logcosh(1.5, 1.0, 0.5))});
  return out;
}

}  // namespace gfi
