#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "polyheat/kernel.hpp"
#include "polyheat/kernels.hpp"

namespace {

using namespace polyheat;

std::vector<double> ramp(std::size_t n) {
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(0.001 * double(i)) * 0.8;
  return u;
}

RegPath sample_path() { return RegPath{DegeneracyFunction::rational(), 0.2, PathVariant::full}; }

template <bool Parallel>
void BM_Coefficient(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto u = ramp(n);
  std::vector<double> out(n);
  const RegPath path = sample_path();
  for (auto _ : state) {
    if constexpr (Parallel) par::evaluate_coefficient(u, path, 1e-3, out);
    else ref::evaluate_coefficient(u, path, 1e-3, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(n));
}

template <bool Parallel>
void BM_Multiply(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  std::vector<cplx> data(n, cplx(1.0, 0.5));
  std::vector<double> symbol(n, 0.999999);
  for (auto _ : state) {
    if constexpr (Parallel) par::multiply(data, symbol);
    else ref::multiply(data, symbol);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(n));
}

template <bool Parallel>
void BM_LogSource(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto u = ramp(n);
  const auto g = ramp(n);
  std::vector<double> out(n);
  const auto f = DegeneracyFunction::rational();
  for (auto _ : state) {
    if constexpr (Parallel) par::log_source(u, g, f, 1e-8, out);
    else ref::log_source(u, g, f, 1e-8, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(n));
}

template <bool Parallel>
void BM_Profile(benchmark::State& state) {
  const auto radii = uniform_radii(20.0, 20.0 / double(state.range(0)));
  std::vector<double> out(radii.size());
  const QuadratureSpec q = default_quadrature(2);
  for (auto _ : state) {
    if constexpr (Parallel) par::tabulate_profile(2, 1, radii, q, out);
    else ref::tabulate_profile(2, 1, radii, q, out);
    benchmark::DoNotOptimize(out.data());
  }
}

} // namespace

BENCHMARK(BM_Coefficient<false>)->Name("coefficient/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_Coefficient<true>)->Name("coefficient/openmp")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_Multiply<false>)->Name("multiply/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_Multiply<true>)->Name("multiply/openmp")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_LogSource<false>)->Name("log_source/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_LogSource<true>)->Name("log_source/openmp")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_Profile<false>)->Name("profile/serial")->Arg(64);
BENCHMARK(BM_Profile<true>)->Name("profile/openmp")->Arg(64);

BENCHMARK_MAIN();
