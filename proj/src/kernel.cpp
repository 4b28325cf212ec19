#include "polyheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "polyheat/bessel.hpp"
#include "polyheat/error.hpp"
#include "polyheat/kernels.hpp"
#include "polyheat/quadrature.hpp"
#include "polyheat/spectral.hpp"

namespace polyheat {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int panel_order = 16;
constexpr int max_doublings = 6;

void require_order(int m, int dim) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  require(dim >= 1 && dim <= 3, ErrorKind::invalid_argument, "profile dimension must be 1, 2 or 3");
}

double radial_integral(int m, int dim, double r, double s_max, int nodes) {
  const int panels = (nodes + panel_order - 1) / panel_order;
  const double nu = 0.5 * (dim - 2);
  auto integrand = [&](double s) {
    const double damp = std::exp(-std::pow(s, 2 * m));
    if (dim == 1) return damp * std::cos(r * s);
    return damp * std::pow(s, 0.5 * dim) * std::pow(r, 1.0 - 0.5 * dim) * bessel_j(nu, r * s);
  };
  double value = composite_gauss(integrand, 0.0, s_max, panels, panel_order);
  // r^{1-N}(rs)^{N/2} J_{(N-2)/2}(rs) for N = 1 is sqrt(2/pi) cos(rs).
  if (dim == 1) value *= std::sqrt(2.0 / pi);
  return value * std::pow(2.0 * pi, -0.5 * dim);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

QuadratureSpec default_quadrature(int m) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  return {2.0 * std::pow(40.0, 1.0 / (2.0 * m)), 256};
}

double profile_value(int m, int dim, double r, const QuadratureSpec& q) {
  require_order(m, dim);
  require(r >= 0.0 && std::isfinite(r), ErrorKind::invalid_argument, "radius must be >= 0");
  require(q.s_max > 0 && q.nodes > 0, ErrorKind::invalid_argument, "bad quadrature spec");
  require(std::exp(-std::pow(q.s_max, 2 * m)) < 1e-16, ErrorKind::invalid_argument,
          "s_max too small: e^{-s_max^{2m}} must be below 1e-16");
  r = std::max(r, 1e-8);
  int nodes = std::max(q.nodes, panel_order * int(std::ceil(r * q.s_max / pi)));
  double coarse = radial_integral(m, dim, r, q.s_max, nodes);
  double residual = 0.0;
  for (int k = 0; k < max_doublings; ++k) {
    nodes *= 2;
    const double fine = radial_integral(m, dim, r, q.s_max, nodes);
    residual = std::abs(fine - coarse);
    if (residual <= 1e-8) return fine;
    coarse = fine;
  }
  fail(ErrorKind::quadrature, "profile quadrature did not converge at r = " + fmt(r) +
                                  ": node-doubling residual " + fmt(residual));
}

KernelProfile profile_bessel(int m, int dim, std::span<const double> radii,
                             const QuadratureSpec& q) {
  require_order(m, dim);
  require(std::is_sorted(radii.begin(), radii.end()), ErrorKind::invalid_argument,
          "radii must be sorted");
  KernelProfile p;
  p.m = m;
  p.dim = dim;
  p.radii.assign(radii.begin(), radii.end());
  p.values.resize(radii.size());
  p.quadrature = q;
  par::tabulate_profile(m, dim, p.radii, q, p.values);
  return p;
}

std::vector<double> uniform_radii(double r_max, double dr) {
  require(r_max > 0 && dr > 0, ErrorKind::invalid_argument, "uniform_radii needs r_max, dr > 0");
  std::vector<double> r;
  const auto n = std::size_t(std::floor(r_max / dr + 1e-9));
  r.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) r.push_back(double(i) * dr);
  return r;
}

double profile_mass(int m, int dim, double r_max, const QuadratureSpec& q) {
  require_order(m, dim);
  require(r_max > 0, ErrorKind::invalid_argument, "r_max must be positive");
  const int panels = std::max(8, int(std::ceil(r_max / 0.5)));
  const GaussRule& rule = gauss_legendre(panel_order);
  std::vector<double> radii, weights;
  const double h = r_max / panels;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < panel_order; ++i) {
      radii.push_back(h * (p + 0.5) + 0.5 * h * rule.nodes[std::size_t(i)]);
      weights.push_back(0.5 * h * rule.weights[std::size_t(i)]);
    }
  std::vector<double> values(radii.size());
  par::tabulate_profile(m, dim, radii, q, values);
  // Surface measure of the unit sphere in R^N.
  const double sphere = 2.0 * std::pow(pi, 0.5 * dim) / std::tgamma(0.5 * dim);
  double total = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i)
    total += weights[i] * values[i] * std::pow(radii[i], dim - 1);
  return sphere * total;
}

namespace {

// Fourier coefficients of t^{-N/2m}F(x t^{-1/2m}) sampled at x_j = -L + j dx.
Field kernel_by_multiplier(int m, const GridSpec& grid, double t) {
  const ModeTable& mt = modes(grid);
  const double xi_max = grid.xi(grid.points / 2);
  require(std::exp(-std::pow(xi_max, 2 * m) * t) < 1e-16, ErrorKind::under_resolved,
          "under-resolved grid: e^{-|xi_max|^{2m} t} = " +
              fmt(std::exp(-std::pow(xi_max, 2 * m) * t)) + " is not below 1e-16");
  Spectrum s(grid);
  const double scale = double(grid.size()) / std::pow(2.0 * grid.half_width, grid.dim);
  const int half = grid.points / 2 + 1;
  for (std::size_t k = 0; k < s.size(); ++k) {
    int parity;
    if (grid.dim == 1) parity = int(k);
    else parity = int(k / std::size_t(half)) + int(k % std::size_t(half));
    const double sign = parity % 2 == 0 ? 1.0 : -1.0;
    s.coeffs[k] = sign * scale * std::exp(-std::pow(mt.xi2[k], m) * t);
  }
  return inverse(s, t);
}

} // namespace

Field profile_fourier(int m, const GridSpec& grid) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  return kernel_by_multiplier(m, grid, 1.0);
}

Field fundamental_solution(int m, const GridSpec& grid, double t) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  require(t > 0.0, ErrorKind::invalid_argument, "fundamental solution needs t > 0");
  const double width = std::pow(t, 1.0 / (2.0 * m));
  require(grid.dx() <= 0.5 * width, ErrorKind::under_resolved,
          "profile unresolved: dx = " + fmt(grid.dx()) + " exceeds 0.5 t^{1/2m} = " +
              fmt(0.5 * width));
  Field h = kernel_by_multiplier(m, grid, t);
  assert_decay(h, 1e-8, "fundamental solution");
  return h;
}

PhSolutionOperator::PhSolutionOperator(const GridSpec& grid, int m) : grid_(grid), m_(m) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  symbol_ = tabulate_symbol(grid, [m](double xi2) { return std::pow(xi2, m); });
}

Field PhSolutionOperator::apply(const Field& u0, double t) const {
  require_same_grid(u0.grid, grid_);
  require(t >= 0.0, ErrorKind::invalid_argument, "phe_solve needs t >= 0");
  if (t == 0.0) return u0;
  Spectrum s = forward(u0);
  std::vector<double> decay(symbol_.size());
  for (std::size_t k = 0; k < decay.size(); ++k) decay[k] = std::exp(-symbol_[k] * t);
  par::multiply(s.coeffs, decay);
  // The zero mode multiplier is exactly 1, so mass is untouched.
  return inverse(s, u0.time + t);
}

Field phe_solve(const Field& u0, int m, double t) {
  assert_decay(u0, 1e-8, "phe_solve initial data");
  return PhSolutionOperator(u0.grid, m).apply(u0, t);
}

int sign_changes(std::span<const double> values, double threshold) {
  int count = 0, last = 0;
  for (double v : values) {
    if (std::abs(v) <= threshold) continue;
    const int s = v > 0 ? 1 : -1;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

namespace {

struct LinearFit {
  double log_c = 0, a = 0, sse = 0;
};

LinearFit fit_fixed_alpha(const std::vector<double>& r, const std::vector<double>& y, double alpha) {
  const double n = double(r.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = std::pow(r[i], alpha);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  LinearFit f;
  f.a = -slope;
  f.log_c = (sy - slope * sx) / n;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double e = y[i] - (f.log_c - f.a * std::pow(r[i], alpha));
    f.sse += e * e;
  }
  return f;
}

} // namespace

DecayFit decay_fit(const KernelProfile& profile, double noise_floor) {
  const auto& r = profile.radii;
  const auto& v = profile.values;
  require(r.size() == v.size(), ErrorKind::invalid_argument, "profile radii/values mismatch");
  std::vector<double> xs, ys;
  if (sign_changes(v) == 0) {
    // Monotone profile: every sample above the floor is on the envelope.
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] > 0 && std::abs(v[i]) > noise_floor) {
        xs.push_back(r[i]);
        ys.push_back(std::log(std::abs(v[i])));
      }
  } else {
    // Outer envelope: local maxima of |F|, skipping the two innermost lobes
    // where the asymptotic regime has not yet set in.
    int seen = 0;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      const double a = std::abs(v[i]);
      if (a <= noise_floor || a < std::abs(v[i - 1]) || a < std::abs(v[i + 1])) continue;
      if (++seen <= 2) continue;
      xs.push_back(r[i]);
      ys.push_back(std::log(a));
    }
  }
  require(xs.size() >= 5, ErrorKind::invalid_argument,
          "insufficient decay range: " + std::to_string(xs.size()) + " envelope points");
  // Golden-section search over alpha; the inner problem is linear.
  double lo = 1.0, hi = 3.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = fit_fixed_alpha(xs, ys, x1).sse, f2 = fit_fixed_alpha(xs, ys, x2).sse;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = fit_fixed_alpha(xs, ys, x1).sse;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = fit_fixed_alpha(xs, ys, x2).sse;
    }
  }
  const double alpha = 0.5 * (lo + hi);
  const LinearFit best = fit_fixed_alpha(xs, ys, alpha);
  return {std::exp(best.log_c), best.a, alpha, int(xs.size())};
}

std::string to_csv(const KernelProfile& p) {
  std::ostringstream out;
  out << "# m=" << p.m << " N=" << p.dim << " s_max=" << fmt(p.quadrature.s_max)
      << " nodes=" << p.quadrature.nodes << "\n";
  out << "r,F\n";
  for (std::size_t i = 0; i < p.radii.size(); ++i)
    out << fmt(p.radii[i]) << "," << fmt(p.values[i]) << "\n";
  if (p.fit)
    out << "# fit C=" << fmt(p.fit->C) << " a=" << fmt(p.fit->a) << " alpha=" << fmt(p.fit->alpha)
        << "\n";
  return out.str();
}

} // namespace polyheat
