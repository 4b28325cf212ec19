#include "polyheat/spectral_theory.hpp"

#include <cmath>
#include <exception>

#include "polyheat/error.hpp"
#include "polyheat/kernel.hpp"
#include "polyheat/kernels.hpp"
#include "polyheat/spectral.hpp"

namespace polyheat {

Field apply_L(const Field& u, int m) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  assert_decay(u, 1e-8, "apply_L operand");
  const GridSpec& g = u.grid;
  // -(-Delta)^m u = (-1)^{m+1} Delta^m u.
  Field out = laplacian_power(u, m);
  const double sign = m % 2 == 0 ? -1.0 : 1.0;
  const VectorField grad = gradient(u);
  const double c1 = 1.0 / (2.0 * m), c0 = double(g.dim) / (2.0 * m);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point y = point_of(g, i);
    double drift = 0.0;
    for (int d = 0; d < g.dim; ++d) drift += y[std::size_t(d)] * grad.components[std::size_t(d)][i];
    out.values[i] = sign * out.values[i] + c1 * drift + c0 * u.values[i];
  }
  out.time = u.time;
  return out;
}

Rational eigenvalue_exact(const MultiIndex& beta, int m) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  return Rational(-beta.order(), 2 * m);
}

double eigenvalue(const MultiIndex& beta, int m) { return eigenvalue_exact(beta, m).to_double(); }

Field eigenfunction(const MultiIndex& beta, int m, const GridSpec& grid) {
  require(beta.dim() == grid.dim, ErrorKind::invalid_argument, "multi-index and grid dimension differ");
  require(beta.order() <= 8, ErrorKind::invalid_argument, "eigenfunction needs |beta| <= 8");
  Spectrum s = forward(profile_fourier(m, grid));
  const ModeTable& mt = modes(grid);
  std::vector<cplx> symbol(s.size(), cplx(1.0, 0.0));
  for (int d = 0; d < grid.dim; ++d) {
    const int e = beta[d];
    if (e == 0) continue;
    const auto& xi = (e % 2 == 1) ? mt.xi_odd[std::size_t(d)] : mt.xi[std::size_t(d)];
    for (std::size_t k = 0; k < symbol.size(); ++k)
      symbol[k] *= std::pow(cplx(0.0, xi[k]), e);
  }
  par::multiply(s.coeffs, symbol);
  const double tail = spectral_tail_fraction(s);
  require(tail <= 1e-6, ErrorKind::under_resolved,
          "under-resolved derivative: spectral tail carries " + std::to_string(tail) +
              " of the energy of D^beta F");
  Field out = inverse(s);
  const double scale =
      (beta.order() % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(beta.factorial()));
  for (double& v : out.values) v *= scale;
  return out;
}

Polynomial neg_laplacian_power(const Polynomial& p, int k) {
  require(k >= 0, ErrorKind::invalid_argument, "power must be >= 0");
  Polynomial out = p;
  for (int i = 0; i < k; ++i) out = Rational(-1) * laplacian(out);
  return out;
}

Polynomial adjoint_eigenpolynomial(const MultiIndex& beta, int m) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  require(beta.order() <= 12, ErrorKind::invalid_argument, "adjoint eigenpolynomial needs |beta| <= 12");
  const Polynomial mono = Polynomial::monomial(beta);
  Polynomial sum = mono;
  Polynomial term = mono;
  std::int64_t j_factorial = 1;
  for (int j = 1; 2 * m * j <= beta.order(); ++j) {
    term = neg_laplacian_power(term, m);
    j_factorial *= j;
    sum += Rational(1, j_factorial) * term;
  }
  sum.set_scale(1.0 / std::sqrt(double(beta.factorial())));
  return sum;
}

Polynomial apply_L_star(const Polynomial& p, int m) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  require(p.degree() <= 12, ErrorKind::invalid_argument, "apply_L_star needs degree <= 12");
  Polynomial out = Rational(-1) * neg_laplacian_power(p, m);
  out += Rational(-1, 2 * m) * euler_operator(p);
  return out;
}

Biorthogonality biorthogonality_matrix(int max_order, int m, const GridSpec& grid,
                                       std::optional<WeightSpec> weight) {
  require(max_order >= 0 && max_order <= 4, ErrorKind::invalid_argument,
          "biorthogonality needs max_order <= 4");
  Biorthogonality b;
  b.indices = multi_indices_up_to(grid.dim, max_order);
  const std::size_t n = b.indices.size();
  std::vector<Field> psi, psi_star;
  for (const auto& beta : b.indices) {
    psi.push_back(eigenfunction(beta, m, grid));
    psi_star.push_back(adjoint_eigenpolynomial(beta, m).sample(grid));
  }
  const WeightSpec rho = weight.value_or(weight_for_order(m, 0.1, 1));
  const WeightSpec rho_star{rho.a, rho.alpha, -1};
  for (std::size_t i = 0; i < n; ++i) {
    b.weighted_norm_psi.push_back(weighted_l2_norm(psi[i], rho));
    b.weighted_norm_psi_star.push_back(weighted_l2_norm(psi_star[i], rho_star));
  }
  b.gram.assign(n * n, 0.0);
  const auto nn = std::ptrdiff_t(n * n);
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ij = 0; ij < nn; ++ij) {
    const std::size_t i = std::size_t(ij) / n, j = std::size_t(ij) % n;
    try {
      Field prod(grid);
      for (std::size_t k = 0; k < prod.size(); ++k)
        prod.values[k] = psi[i].values[k] * psi_star[j].values[k];
      assert_decay(prod, 1e-8, "biorthogonality integrand");
      b.gram[std::size_t(ij)] = integrate(prod);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = b.at(i, j);
      if (i == j) b.max_diagonal_error = std::max(b.max_diagonal_error, std::abs(v - 1.0));
      else b.max_off_diagonal = std::max(b.max_off_diagonal, std::abs(v));
    }
  return b;
}

double eigen_residual(const MultiIndex& beta, int m, const GridSpec& grid) {
  const Field psi = eigenfunction(beta, m, grid);
  const Field lpsi = apply_L(psi, m);
  const double lambda = eigenvalue(beta, m);
  Field r(grid);
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] = lpsi.values[i] - lambda * psi.values[i];
  return l2_norm(r) / l2_norm(psi);
}

} // namespace polyheat
