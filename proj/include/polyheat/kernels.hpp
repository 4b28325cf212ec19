#pragma once

#include <span>

#include "polyheat/degeneracy.hpp"
#include "polyheat/spectral.hpp"

// Data-parallel inner loops. Each kernel exists twice: `par` is the OpenMP
// version used by the library, `ref` is the plain serial loop kept as the
// reference the tests compare against. Both produce bitwise-identical output
// because every kernel is pointwise (no reductions).

namespace polyheat {

struct QuadratureSpec;

namespace par {

void multiply(std::span<cplx> data, std::span<const double> symbol);
void multiply(std::span<cplx> data, std::span<const cplx> symbol);
/// out[i] = coefficient(path, eps, u[i]).
void evaluate_coefficient(std::span<const double> u, const RegPath& path, double eps,
                          std::span<double> out);
/// out[i] = ln f(max(|u[i]|, eta)) * g[i].
void log_source(std::span<const double> u, std::span<const double> g,
                const DegeneracyFunction& f, double eta, std::span<double> out);
/// out[i] = F_{m,N}(radii[i]) by Bessel quadrature.
void tabulate_profile(int m, int dim, std::span<const double> radii, const QuadratureSpec& q,
                      std::span<double> out);

} // namespace par

namespace ref {

void multiply(std::span<cplx> data, std::span<const double> symbol);
void multiply(std::span<cplx> data, std::span<const cplx> symbol);
void evaluate_coefficient(std::span<const double> u, const RegPath& path, double eps,
                          std::span<double> out);
void log_source(std::span<const double> u, std::span<const double> g,
                const DegeneracyFunction& f, double eta, std::span<double> out);
void tabulate_profile(int m, int dim, std::span<const double> radii, const QuadratureSpec& q,
                      std::span<double> out);

} // namespace ref

int max_threads();

} // namespace polyheat
