#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyheat/grid.hpp"

namespace polyheat {

struct QuadratureSpec {
  double s_max = 0.0;
  /// Minimum node count; raised with r so the oscillation r*s is resolved.
  int nodes = 256;
};

/// s_max = 2 * 40^{1/2m}, so e^{-s_max^{2m}} is far below 1e-16.
QuadratureSpec default_quadrature(int m);

struct DecayFit {
  double C = 0.0;      // the product C*omega of the decay bound
  double a = 0.0;
  double alpha = 0.0;
  int points = 0;
};

struct KernelProfile {
  int m = 1;
  int dim = 1;
  std::vector<double> radii;
  std::vector<double> values;
  QuadratureSpec quadrature;
  std::optional<DecayFit> fit;
};

/// F_{m,N}(r) = (2 pi)^{-N/2} r^{1-N} int_0^inf e^{-s^{2m}} (rs)^{N/2} J_{(N-2)/2}(rs) ds.
/// r <= 1e-8 is evaluated at r = 1e-8.
double profile_value(int m, int dim, double r, const QuadratureSpec& q);
KernelProfile profile_bessel(int m, int dim, std::span<const double> radii,
                             const QuadratureSpec& q);
/// Radii 0, dr, 2dr, ... up to r_max.
std::vector<double> uniform_radii(double r_max, double dr);

/// int_{R^N} F by radial Gauss quadrature of the Bessel profile over [0, r_max].
double profile_mass(int m, int dim, double r_max, const QuadratureSpec& q);

/// Inverse transform of (2 pi)^{-N} e^{-|xi|^{2m}} on the grid.
Field profile_fourier(int m, const GridSpec& grid);

/// H(x, t) = t^{-N/2m} F(x t^{-1/2m}).
Field fundamental_solution(int m, const GridSpec& grid, double t);

/// Multiplier e^{-|xi|^{2m} t} with the symbol cached per grid and order.
class PhSolutionOperator {
public:
  PhSolutionOperator(const GridSpec& grid, int m);

  const GridSpec& grid() const { return grid_; }
  int order() const { return m_; }
  std::span<const double> symbol() const { return symbol_; }
  Field apply(const Field& u0, double t) const;

private:
  GridSpec grid_;
  int m_;
  std::vector<double> symbol_;  // |xi|^{2m}
};

/// Exact solution of u_t = -(-Delta)^m u on the torus.
Field phe_solve(const Field& u0, int m, double t);

/// Least-squares fit of ln|F| ~ ln(C) - a r^alpha over the outer envelope maxima.
DecayFit decay_fit(const KernelProfile& profile, double noise_floor = 1e-13);

int sign_changes(std::span<const double> values, double threshold = 0.0);

std::string to_csv(const KernelProfile& profile);

} // namespace polyheat
