#include "gfi/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace gfi {

Grid1D::Grid1D(double lo, double hi, std::size_t n) : lo_(lo), hi_(hi), n_(n) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw DomainError("Grid1D: need finite lo < hi");
  if (n < 3) throw DomainError("Grid1D: need at least 3 nodes");
  h_ = (hi - lo) / static_cast<double>(n - 1);
}

double Grid1D::operator[](std::size_t i) const {
  if (i + 1 == n_) return hi_;
  return lo_ + static_cast<double>(i) * h_;
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)[i];
  return out;
}

double QuadratureRule::sum(const Evaluator& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
  return s;
}

QuadratureRule gauss_hermite(int n) {
  if (n < 2 || n > 2000) throw DomainError("gauss_hermite: n must lie in [2, 2000]");
  // Nodes are the eigenvalues of the Jacobi matrix (zero diagonal, off-diagonal
  // sqrt(k)); they are bracketed by Sturm bisection, then polished by Newton on
  // the orthonormal recurrence. Large arguments are handled by rescaling.
  auto count_below = [n](double x) {
    int cnt = 0;
    double d = -x;
    if (d < 0) ++cnt;
    for (int k = 1; k < n; ++k) {
      if (d == 0.0) d = 1e-300;
      d = -x - static_cast<double>(k) / d;
      if (d < 0) ++cnt;
    }
    return cnt;
  };
  const double rescale = 1e150;
  const double log_rescale = std::log(rescale);
  // Returns p_n(x) / p_n'(x) and log|p_n'(x)| for orthonormal He-polynomials.
  auto newton_data = [n, rescale, log_rescale](double x, double& log_dp) {
    double p1 = 1.0, p2 = 0.0, log_scale = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = (x * p2 - std::sqrt(static_cast<double>(j)) * p3) / std::sqrt(j + 1.0);
      if (std::abs(p1) > rescale) {
        p1 /= rescale;
        p2 /= rescale;
        log_scale += log_rescale;
      }
    }
    const double dp = std::sqrt(static_cast<double>(n)) * p2;
    log_dp = std::log(std::abs(dp)) + log_scale;
    return p1 / dp;
  };

  const int m = (n + 1) / 2;
  std::vector<double> x(n), logw(n);
  double upper = 2.0 * std::sqrt(static_cast<double>(n)) + 1.0;
  for (int i = 0; i < m; ++i) {
    const int r = n - 1 - i;  // index of the eigenvalue in ascending order
    double lo = 0.0, hi = upper;
    if (2 * r + 1 == n) {
      hi = lo = 0.0;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) > r) hi = mid;
        else lo = mid;
      }
    }
    double root = 0.5 * (lo + hi), log_dp = 0.0;
    for (int it = 0; it < 3; ++it) {
      const double next = root - newton_data(root, log_dp);
      if (next < lo || next > hi) break;
      root = next;
    }
    newton_data(root, log_dp);
    x[r] = root;
    x[n - 1 - r] = -root;
    // Christoffel weight 1 / sum_k p_k(x)^2 = 1 / (p_n'(x) p_{n-1}(x) sqrt(n)) at a root;
    // with p_n' = sqrt(n) p_{n-1} this is 1 / p_n'(x)^2.
    logw[r] = logw[n - 1 - r] = -2.0 * log_dp;
    upper = root;
  }
  QuadratureRule rule;
  rule.measure = Measure::gaussian;
  for (int i = 0; i < n; ++i) {
    if (logw[i] < -700.0) continue;
    rule.nodes.push_back(x[i]);
    rule.weights.push_back(std::exp(logw[i]));
  }
  return rule;
}

double integrate_gamma(const Evaluator& f, const QuadratureRule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrate_gamma: non-finite integrand " << v << " at node x=" << rule.nodes[i];
      throw NumericalError(msg.str());
    }
    s += rule.weights[i] * v;
  }
  return s;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? x : p1;
      double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

double trapezoid(std::span<const double> values, double h) {
  if (values.size() < 2) throw DomainError("trapezoid: need at least 2 samples");
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * h;
}

double simpson(std::span<const double> values, double h) {
  if (values.size() < 3 || values.size() % 2 == 0)
    throw DomainError("simpson: need an odd number (>= 3) of samples");
  double s = values.front() + values.back();
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += (i % 2 ? 4.0 : 2.0) * values[i];
  return s * h / 3.0;
}

QuadratureRule trapezoid_rule(const Grid1D& grid) {
  QuadratureRule rule;
  rule.nodes = grid.nodes();
  rule.weights.assign(grid.size(), grid.spacing());
  rule.weights.front() *= 0.5;
  rule.weights.back() *= 0.5;
  return rule;
}

namespace {

double gl_piece(const Evaluator& h, const Evaluator& w, double a, double b, const QuadratureRule& gl) {
  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t k = 0; k < gl.size(); ++k) {
    const double x = c + r * gl.nodes[k];
    s += gl.weights[k] * std::abs(h(x)) * w(x);
  }
  return s * r;
}

}  // namespace

double integrate_abs(const Evaluator& h, const Evaluator& w, const Grid1D& cells) {
  static const QuadratureRule gl = gauss_legendre(5);
  double total = 0.0;
  double xa = cells[0], ha = h(xa);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const double xb = cells[i], hb = h(xb);
    if ((ha < 0 && hb > 0) || (ha > 0 && hb < 0)) {
      const double r = brent_root(h, xa, xb);
      total += gl_piece(h, w, xa, r, gl) + gl_piece(h, w, r, xb, gl);
    } else {
      total += gl_piece(h, w, xa, xb, gl);
    }
    xa = xb;
    ha = hb;
  }
  return total;
}

double brent_root(const Evaluator& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw NumericalError("brent_root: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < 200; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NumericalError("brent_root: no convergence");
}

double log_sum_exp(std::span<const double> v) {
  double mx = -kInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double ndtr(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double log_ndtr(double z) {
  if (z > 5.0) return std::log1p(-0.5 * std::erfc(z / std::sqrt(2.0)));
  if (z > -30.0) return std::log(0.5 * std::erfc(-z / std::sqrt(2.0)));
  const double z2 = 1.0 / (z * z);
  // Asymptotic series of the Mills ratio.
  const double series = 1.0 - z2 * (1.0 - 3.0 * z2 * (1.0 - 5.0 * z2 * (1.0 - 7.0 * z2 * (1.0 - 9.0 * z2))));
  return -0.5 * z * z - std::log(-z) - 0.5 * kLog2Pi + std::log(series);
}

double hermite_value(double x0, double x1, double f0, double f1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double u = 1.0 - t;
  return f0 * (1.0 + 2.0 * t) * u * u + d0 * h * t * u * u + f1 * t * t * (3.0 - 2.0 * t) -
         d1 * h * t * t * u;
}

std::vector<double> legendre_transform(std::span<const double> x, std::span<const double> f,
                                       std::span<const double> y, LegendreExtension ext) {
  if (x.size() != f.size()) throw DomainError("legendre_transform: size mismatch");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("legendre_transform: x must be increasing");
  for (std::size_t j = 1; j < y.size(); ++j)
    if (y[j] < y[j - 1]) throw DomainError("legendre_transform: y must be non-decreasing");

  // Lower convex hull of the finite points.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(f[i]) || f[i] == -kInf) throw DomainError("legendre_transform: invalid value");
    if (f[i] == kInf) continue;
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (f[i] - f[a]) - (f[b] - f[a]) * (x[i] - x[a]);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  if (hull.empty()) throw DomainError("legendre_transform: empty effective domain");

  const std::size_t k = hull.size();
  std::vector<double> slope(k > 1 ? k - 1 : 0);
  for (std::size_t j = 0; j + 1 < k; ++j)
    slope[j] = (f[hull[j + 1]] - f[hull[j]]) / (x[hull[j + 1]] - x[hull[j]]);

  std::vector<double> out(y.size(), kInf);
  bool any_finite = false;
  std::size_t v = 0;  // active hull vertex
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double yy = y[j];
    if (ext == LegendreExtension::recession && k >= 2 &&
        (yy < slope.front() || yy > slope.back()))
      continue;
    if (ext == LegendreExtension::recession && k == 1) continue;
    while (v + 1 < k && slope[v] < yy) ++v;
    out[j] = x[hull[v]] * yy - f[hull[v]];
    any_finite = true;
  }
  if (!any_finite) throw DomainError("legendre_transform: empty effective domain");
  return out;
}

std::vector<double> legendre_transform(const Grid1D& xgrid, std::span<const double> f,
                                       const Grid1D& ygrid, LegendreExtension ext) {
  const auto xs = xgrid.nodes();
  const auto ys = ygrid.nodes();
  return legendre_transform(xs, f, ys, ext);
}

namespace detail {

double second_neumann_eigenvalue(const Evaluator& logdensity, const Grid1D& grid) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  std::vector<double> lw(n), lmid(n - 1);
  double mx = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    lw[i] = logdensity(grid[i]);
    if (std::isnan(lw[i])) throw NumericalError("spectral_gap: log-density is NaN");
    mx = std::max(mx, lw[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) lmid[i] = logdensity(grid[i] + 0.5 * h);
  // Trim nodes whose weights underflow.
  const double floor = mx - 690.0;
  std::size_t first = 0, last = n - 1;
  while (first < n && lw[first] < floor) ++first;
  while (last > first && lw[last] < floor) --last;
  if (last < first + 2) throw NumericalError("spectral_gap: fewer than 3 resolved nodes");

  const std::size_t m = last - first + 1;
  std::vector<double> mass(m), cond(m - 1), diag(m), off(m - 1);
  for (std::size_t k = 0; k < m; ++k) {
    mass[k] = h * std::exp(lw[first + k] - mx);
    if (k == 0 || k + 1 == m) mass[k] *= 0.5;
  }
  for (std::size_t k = 0; k + 1 < m; ++k) cond[k] = std::exp(lmid[first + k] - mx) / h;
  for (std::size_t k = 0; k < m; ++k) {
    double c = 0.0;
    if (k > 0) c += cond[k - 1];
    if (k + 1 < m) c += cond[k];
    diag[k] = c / mass[k];
  }
  for (std::size_t k = 0; k + 1 < m; ++k) off[k] = -cond[k] / std::sqrt(mass[k] * mass[k + 1]);

  auto count_below = [&](double x) {
    std::size_t cnt = 0;
    double d = diag[0] - x;
    if (d < 0) ++cnt;
    for (std::size_t k = 1; k < m; ++k) {
      if (d == 0.0) d = 1e-300;
      d = diag[k] - x - off[k - 1] * off[k - 1] / d;
      if (d < 0) ++cnt;
    }
    return cnt;
  };

  double hi = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double r = diag[k];
    if (k > 0) r += std::abs(off[k - 1]);
    if (k + 1 < m) r += std::abs(off[k]);
    hi = std::max(hi, r);
  }
  double lo = 0.0;
  if (count_below(hi) < 2) throw NumericalError("spectral_gap: eigenvalue bracket failed");
  for (int it = 0; it < 400 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 2) hi = mid;
    else lo = mid;
  }
  if (!(hi - lo <= 1e-12 * hi)) throw NumericalError("spectral_gap: bisection did not converge");
  return 0.5 * (lo + hi);
}

}  // namespace detail

SpectralGap spectral_gap(const Evaluator& logdensity, const Grid1D& grid) {
  const double coarse = detail::second_neumann_eigenvalue(logdensity, grid);
  const double fine = detail::second_neumann_eigenvalue(logdensity, grid.refined());
  return {coarse, fine, std::abs(fine - coarse) > 1e-4};
}

}  // namespace gfi
