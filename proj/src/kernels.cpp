#include "polyheat/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "polyheat/error.hpp"
#include "polyheat/kernel.hpp"

#ifdef POLYHEAT_HAVE_OPENMP
#include <omp.h>
#endif

namespace polyheat {

namespace {

// Below this many entries the fork/join overhead dominates.
constexpr std::ptrdiff_t parallel_threshold = 4096;

void check_sizes(std::size_t a, std::size_t b) {
  require(a == b, ErrorKind::invalid_argument, "kernel operands differ in length");
}

} // namespace

namespace par {

void multiply(std::span<cplx> data, std::span<const double> symbol) {
  check_sizes(data.size(), symbol.size());
  const auto n = std::ptrdiff_t(data.size());
#pragma omp parallel for if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= symbol[i];
}

void multiply(std::span<cplx> data, std::span<const cplx> symbol) {
  check_sizes(data.size(), symbol.size());
  const auto n = std::ptrdiff_t(data.size());
#pragma omp parallel for if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= symbol[i];
}

void evaluate_coefficient(std::span<const double> u, const RegPath& path, double eps,
                          std::span<double> out) {
  check_sizes(u.size(), out.size());
  require_eps(eps);
  const auto n = std::ptrdiff_t(u.size());
#pragma omp parallel for if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = coefficient(path, eps, u[i]);
}

void log_source(std::span<const double> u, std::span<const double> g,
                const DegeneracyFunction& f, double eta, std::span<double> out) {
  check_sizes(u.size(), out.size());
  check_sizes(g.size(), out.size());
  require(eta > 0, ErrorKind::invalid_argument, "clamp floor must be positive");
  const auto n = std::ptrdiff_t(u.size());
#pragma omp parallel for if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f.log(std::max(std::abs(u[i]), eta)) * g[i];
}

void tabulate_profile(int m, int dim, std::span<const double> radii, const QuadratureSpec& q,
                      std::span<double> out) {
  check_sizes(radii.size(), out.size());
  const auto n = std::ptrdiff_t(radii.size());
  // Exceptions may not cross the parallel region; collect and rethrow.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4) if (n > 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = profile_value(m, dim, radii[i], q);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

} // namespace par

namespace ref {

void multiply(std::span<cplx> data, std::span<const double> symbol) {
  check_sizes(data.size(), symbol.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= symbol[i];
}

void multiply(std::span<cplx> data, std::span<const cplx> symbol) {
  check_sizes(data.size(), symbol.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= symbol[i];
}

void evaluate_coefficient(std::span<const double> u, const RegPath& path, double eps,
                          std::span<double> out) {
  check_sizes(u.size(), out.size());
  require_eps(eps);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = coefficient(path, eps, u[i]);
}

void log_source(std::span<const double> u, std::span<const double> g,
                const DegeneracyFunction& f, double eta, std::span<double> out) {
  check_sizes(u.size(), out.size());
  check_sizes(g.size(), out.size());
  require(eta > 0, ErrorKind::invalid_argument, "clamp floor must be positive");
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = f.log(std::max(std::abs(u[i]), eta)) * g[i];
}

void tabulate_profile(int m, int dim, std::span<const double> radii, const QuadratureSpec& q,
                      std::span<double> out) {
  check_sizes(radii.size(), out.size());
  for (std::size_t i = 0; i < radii.size(); ++i) out[i] = profile_value(m, dim, radii[i], q);
}

} // namespace ref

int max_threads() {
#ifdef POLYHEAT_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

} // namespace polyheat
