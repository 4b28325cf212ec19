#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "polyheat/error.hpp"

namespace polyheat {

/// Periodic box [-L, L)^N sampled with M points per dimension.
struct GridSpec {
  int dim = 1;
  double half_width = 1.0;
  int points = 8;

  double dx() const { return 2.0 * half_width / points; }
  double cell_volume() const { return dim == 1 ? dx() : dx() * dx(); }
  double volume() const { return dim == 1 ? 2.0 * half_width : 4.0 * half_width * half_width; }
  std::size_t size() const {
    return dim == 1 ? std::size_t(points) : std::size_t(points) * std::size_t(points);
  }
  double coord(int i) const { return -half_width + i * dx(); }
  /// Integer wavenumber of full-spectrum index i, in [-M/2, M/2).
  int wavenumber(int i) const { return i < points / 2 ? i : i - points; }
  double xi(int k) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

GridSpec make_grid(int dim, double half_width, int points_per_dim);

void require_same_grid(const GridSpec& a, const GridSpec& b);

using Point = std::array<double, 2>;

double norm(const Point& p, int dim);

/// Physical coordinates of flat index `idx` (row-major, last dimension fastest).
Point point_of(const GridSpec& grid, std::size_t idx);

struct Field {
  GridSpec grid;
  std::vector<double> values;
  double time = 0.0;

  Field() = default;
  explicit Field(const GridSpec& g, double t = 0.0) : grid(g), values(g.size(), 0.0), time(t) {}
  Field(const GridSpec& g, std::vector<double> v, double t = 0.0);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

struct VectorField {
  GridSpec grid;
  std::vector<std::vector<double>> components;

  VectorField() = default;
  explicit VectorField(const GridSpec& g)
      : grid(g), components(std::size_t(g.dim), std::vector<double>(g.size(), 0.0)) {}
};

/// Exponential weight e^{sign * a |x|^alpha}; sign +1 is rho, -1 is rho*.
struct WeightSpec {
  double a = 0.25;
  double alpha = 2.0;
  int sign = 1;
};

WeightSpec weight_for_order(int m, double a, int sign);

template <class Fn>
Field sample(const GridSpec& grid, Fn&& fn, double t = 0.0) {
  Field out(grid, t);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = fn(point_of(grid, i));
  return out;
}

// Spectral operators. All are exact Fourier multipliers on the torus.
Field laplacian_power(const Field& u, int k);
VectorField gradient(const Field& u);
Field divergence(const VectorField& v);

double integrate(const Field& u);
double inner(const Field& u, const Field& v);
double inner(const VectorField& u, const VectorField& v);
double l2_norm(const Field& u);
double l2_norm(const VectorField& v);
double weighted_l2_norm(const Field& u, const WeightSpec& w);
double max_abs(const Field& u);
bool all_finite(const Field& u);

/// max |u| over the shell |x| > fraction * L.
double shell_max(const Field& u, double fraction = 0.9);

/// Throws decay_violation when the boundary shell carries more than `tol`.
void assert_decay(const Field& u, double tol = 1e-8, const char* context = "field");

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);

} // namespace polyheat
