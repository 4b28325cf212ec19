#pragma once

#include <optional>
#include <vector>

#include "polyheat/grid.hpp"
#include "polyheat/polynomial.hpp"

namespace polyheat {

/// L[F] = -(-Delta)^m F + (1/2m) y.grad F + (N/2m) F.
Field apply_L(const Field& u, int m);

Rational eigenvalue_exact(const MultiIndex& beta, int m);
/// lambda_beta = -|beta| / 2m.
double eigenvalue(const MultiIndex& beta, int m);

/// psi_beta = (-1)^{|beta|} / sqrt(beta!) D^beta F, built on profile_fourier.
Field eigenfunction(const MultiIndex& beta, int m, const GridSpec& grid);

/// sqrt(beta!) psi*_beta = y^beta + sum_{j>=1} (1/j!) (-Delta)^{mj} y^beta.
Polynomial adjoint_eigenpolynomial(const MultiIndex& beta, int m);

/// L* = -(-Delta)^m - (1/2m) y.grad, applied exactly.
Polynomial apply_L_star(const Polynomial& p, int m);

/// (-Delta)^k p, exact.
Polynomial neg_laplacian_power(const Polynomial& p, int k);

struct Biorthogonality {
  std::vector<MultiIndex> indices;
  /// gram[i * size + j] = <psi_{beta_i}, psi*_{beta_j}>.
  std::vector<double> gram;
  std::vector<double> weighted_norm_psi;       // under rho
  std::vector<double> weighted_norm_psi_star;  // under rho*
  double max_off_diagonal = 0.0;
  double max_diagonal_error = 0.0;

  double at(std::size_t i, std::size_t j) const { return gram[i * indices.size() + j]; }
};

/// Plain L^2 pairing over the box for all |beta|, |gamma| <= max_order.
Biorthogonality biorthogonality_matrix(int max_order, int m, const GridSpec& grid,
                                       std::optional<WeightSpec> weight = std::nullopt);

/// ||L psi - lambda psi|| / ||psi||.
double eigen_residual(const MultiIndex& beta, int m, const GridSpec& grid);

} // namespace polyheat
