#include "polyheat/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "polyheat/spectral.hpp"

namespace polyheat {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::grid_mismatch: return "grid_mismatch";
    case ErrorKind::decay_violation: return "decay_violation";
    case ErrorKind::under_resolved: return "under_resolved";
    case ErrorKind::quadrature: return "quadrature";
    case ErrorKind::blow_up: return "blow_up";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::boundedness: return "boundedness";
    case ErrorKind::schedule_range: return "schedule_range";
    case ErrorKind::log_singularity: return "log_singularity";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

double GridSpec::xi(int k) const { return M_PI * k / half_width; }

GridSpec make_grid(int dim, double half_width, int points_per_dim) {
  require(dim == 1 || dim == 2, ErrorKind::invalid_argument, "dim must be 1 or 2");
  require(half_width > 0 && std::isfinite(half_width), ErrorKind::invalid_argument,
          "half_width must be positive");
  require(points_per_dim >= 8 && points_per_dim % 2 == 0, ErrorKind::invalid_argument,
          "points_per_dim must be even ≥ 8");
  return GridSpec{dim, half_width, points_per_dim};
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  require(a == b, ErrorKind::grid_mismatch, "fields live on different grids");
}

double norm(const Point& p, int dim) {
  return dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

Point point_of(const GridSpec& grid, std::size_t idx) {
  if (grid.dim == 1) return {grid.coord(int(idx)), 0.0};
  const auto m = std::size_t(grid.points);
  return {grid.coord(int(idx / m)), grid.coord(int(idx % m))};
}

Field::Field(const GridSpec& g, std::vector<double> v, double t)
    : grid(g), values(std::move(v)), time(t) {
  require(values.size() == grid.size(), ErrorKind::grid_mismatch,
          "value count does not match grid size");
}

WeightSpec weight_for_order(int m, double a, int sign) {
  require(m >= 1, ErrorKind::invalid_argument, "m must be >= 1");
  return WeightSpec{a, 2.0 * m / (2.0 * m - 1.0), sign};
}

Field laplacian_power(const Field& u, int k) {
  require(k >= 0, ErrorKind::invalid_argument, "Laplacian power must be >= 0");
  if (k == 0) return u;
  Spectrum s = forward(u);
  const ModeTable& mt = modes(u.grid);
  for (std::size_t i = 0; i < s.size(); ++i) s.coeffs[i] *= std::pow(-mt.xi2[i], k);
  return inverse(s, u.time);
}

VectorField gradient(const Field& u) {
  const Spectrum s = forward(u);
  const ModeTable& mt = modes(u.grid);
  VectorField out(u.grid);
  Spectrum d(u.grid);
  for (int c = 0; c < u.grid.dim; ++c) {
    const auto& xi = mt.xi_odd[std::size_t(c)];
    for (std::size_t i = 0; i < s.size(); ++i) d.coeffs[i] = cplx(0.0, xi[i]) * s.coeffs[i];
    inverse_into(d, out.components[std::size_t(c)]);
  }
  return out;
}

Field divergence(const VectorField& v) {
  require(int(v.components.size()) == v.grid.dim, ErrorKind::grid_mismatch,
          "vector field component count must equal grid dim");
  const ModeTable& mt = modes(v.grid);
  Spectrum acc(v.grid), s(v.grid);
  for (int c = 0; c < v.grid.dim; ++c) {
    forward_from(v.components[std::size_t(c)], s);
    const auto& xi = mt.xi_odd[std::size_t(c)];
    for (std::size_t i = 0; i < s.size(); ++i) acc.coeffs[i] += cplx(0.0, xi[i]) * s.coeffs[i];
  }
  return inverse(acc);
}

double integrate(const Field& u) {
  double sum = 0.0;
  for (double v : u.values) sum += v;
  return sum * u.grid.cell_volume();
}

double inner(const Field& u, const Field& v) {
  require_same_grid(u.grid, v.grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u.values[i] * v.values[i];
  return sum * u.grid.cell_volume();
}

double inner(const VectorField& u, const VectorField& v) {
  require_same_grid(u.grid, v.grid);
  double sum = 0.0;
  for (std::size_t c = 0; c < u.components.size(); ++c)
    for (std::size_t i = 0; i < u.components[c].size(); ++i)
      sum += u.components[c][i] * v.components[c][i];
  return sum * u.grid.cell_volume();
}

double l2_norm(const Field& u) { return std::sqrt(inner(u, u)); }
double l2_norm(const VectorField& v) { return std::sqrt(inner(v, v)); }

double weighted_l2_norm(const Field& u, const WeightSpec& w) {
  require(w.a > 0, ErrorKind::invalid_argument, "weight a must be positive");
  require(w.alpha > 1.0 && w.alpha <= 2.0, ErrorKind::invalid_argument, "weight alpha must lie in (1, 2]");
  require(w.sign == 1 || w.sign == -1, ErrorKind::invalid_argument, "weight sign must be ±1");
  const double reach = u.grid.dim == 1 ? u.grid.half_width : std::sqrt(2.0) * u.grid.half_width;
  if (w.sign > 0 && w.a * std::pow(reach, w.alpha) > 600.0)
    fail(ErrorKind::invalid_argument, "weight exceeds representable range: a*L^alpha > 600");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = norm(point_of(u.grid, i), u.grid.dim);
    sum += u.values[i] * u.values[i] * std::exp(w.sign * w.a * std::pow(r, w.alpha));
  }
  return std::sqrt(sum * u.grid.cell_volume());
}

double max_abs(const Field& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Field& u) {
  return std::all_of(u.values.begin(), u.values.end(), [](double v) { return std::isfinite(v); });
}

double shell_max(const Field& u, double fraction) {
  const double edge = fraction * u.grid.half_width;
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (norm(point_of(u.grid, i), u.grid.dim) > edge) m = std::max(m, std::abs(u.values[i]));
  return m;
}

void assert_decay(const Field& u, double tol, const char* context) {
  const double shell = shell_max(u, 0.9);
  if (!(shell < tol)) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s: boundary shell |x|>0.9L carries max|u| = %.3e at t = %.6g, tolerance %.1e; "
                  "enlarge the box",
                  context, shell, u.time, tol);
    fail(ErrorKind::decay_violation, buf);
  }
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid);
  Field out(a.grid, a.time);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid);
  Field out(a.grid, a.time);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

Field operator*(double s, const Field& a) {
  Field out(a.grid, a.time);
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = s * a.values[i];
  return out;
}

} // namespace polyheat
