#include "polyheat/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace polyheat {
namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

using GridKey = std::tuple<int, int, double>;

GridKey key_of(const GridSpec& g) { return {g.dim, g.points, g.half_width}; }

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW_UNALIGNED plans may be executed concurrently on any arrays via the
// new-array execute interface; only planning itself is serialized.
const PlanPair& plans_for(int dim, int points) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({dim, points});
  if (it != cache.end()) return it->second;
  const std::size_t n_real = dim == 1 ? std::size_t(points) : std::size_t(points) * points;
  const std::size_t n_cplx = dim == 1 ? std::size_t(points / 2 + 1)
                                      : std::size_t(points) * std::size_t(points / 2 + 1);
  std::vector<double> in(n_real);
  std::vector<cplx> out(n_cplx);
  auto* cout = reinterpret_cast<fftw_complex*>(out.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  if (dim == 1) {
    p.r2c = fftw_plan_dft_r2c_1d(points, in.data(), cout, flags);
    p.c2r = fftw_plan_dft_c2r_1d(points, cout, in.data(), flags | FFTW_DESTROY_INPUT);
  } else {
    p.r2c = fftw_plan_dft_r2c_2d(points, points, in.data(), cout, flags);
    p.c2r = fftw_plan_dft_c2r_2d(points, points, cout, in.data(), flags | FFTW_DESTROY_INPUT);
  }
  return cache.emplace(std::pair{dim, points}, p).first->second;
}

ModeTable build_modes(const GridSpec& g) {
  ModeTable mt;
  mt.grid = g;
  const int M = g.points;
  const int half = M / 2 + 1;
  const std::size_t n = spectrum_size(g);
  mt.xi.assign(std::size_t(g.dim), std::vector<double>(n));
  mt.xi_odd.assign(std::size_t(g.dim), std::vector<double>(n));
  mt.xi2.resize(n);
  mt.parseval_weight.resize(n);
  mt.dealias.resize(n);
  mt.kmax.resize(n);
  const int band = M / 3;
  auto fill = [&](std::size_t idx, int k0, int k1, int j_last) {
    double x2 = 0.0;
    int kabs = 0;
    const int ks[2] = {k0, k1};
    for (int d = 0; d < g.dim; ++d) {
      const double xi = g.xi(ks[d]);
      mt.xi[std::size_t(d)][idx] = xi;
      mt.xi_odd[std::size_t(d)][idx] = (ks[d] == -M / 2 || ks[d] == M / 2) ? 0.0 : xi;
      x2 += xi * xi;
      kabs = std::max(kabs, std::abs(ks[d]));
    }
    mt.xi2[idx] = x2;
    mt.kmax[idx] = kabs;
    mt.dealias[idx] = kabs <= band ? 1.0 : 0.0;
    mt.parseval_weight[idx] = (j_last == 0 || j_last == M / 2) ? 1.0 : 2.0;
  };
  if (g.dim == 1) {
    for (int j = 0; j < half; ++j) fill(std::size_t(j), j, 0, j);
  } else {
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < half; ++j)
        fill(std::size_t(i) * half + j, g.wavenumber(i), j, j);
  }
  return mt;
}

} // namespace

std::size_t spectrum_size(const GridSpec& g) {
  return g.dim == 1 ? std::size_t(g.points / 2 + 1)
                    : std::size_t(g.points) * std::size_t(g.points / 2 + 1);
}

Spectrum::Spectrum(const GridSpec& g) : grid(g), coeffs(spectrum_size(g)) {}

const ModeTable& modes(const GridSpec& grid) {
  static std::map<GridKey, std::unique_ptr<ModeTable>> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto& slot = cache[key_of(grid)];
  if (!slot) slot = std::make_unique<ModeTable>(build_modes(grid));
  return *slot;
}

void forward_from(std::span<const double> values, Spectrum& out) {
  require(values.size() == out.grid.size(), ErrorKind::grid_mismatch, "forward: size mismatch");
  out.coeffs.resize(spectrum_size(out.grid));
  const PlanPair& p = plans_for(out.grid.dim, out.grid.points);
  // r2c does not modify its input with FFTW_ESTIMATE|UNALIGNED plans.
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(values.data()),
                       reinterpret_cast<fftw_complex*>(out.coeffs.data()));
}

Spectrum forward(const Field& u) {
  Spectrum s(u.grid);
  forward_from(u.values, s);
  return s;
}

void inverse_into(const Spectrum& s, std::span<double> out) {
  require(out.size() == s.grid.size(), ErrorKind::grid_mismatch, "inverse: size mismatch");
  std::vector<cplx> work = s.coeffs;  // c2r destroys its input
  const PlanPair& p = plans_for(s.grid.dim, s.grid.points);
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(work.data()), out.data());
  const double norm = 1.0 / double(s.grid.size());
  for (double& v : out) v *= norm;
}

Field inverse(const Spectrum& s, double time) {
  Field out(s.grid, time);
  inverse_into(s, out.values);
  return out;
}

double spectral_energy(const Spectrum& s, std::span<const double> factor) {
  const ModeTable& mt = modes(s.grid);
  double sum = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = factor.empty() ? 1.0 : factor[k];
    sum += mt.parseval_weight[k] * f * std::norm(s.coeffs[k]);
  }
  return sum * s.grid.cell_volume() / double(s.grid.size());
}

double spectral_tail_fraction(const Spectrum& s) {
  const ModeTable& mt = modes(s.grid);
  double total = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double e = mt.parseval_weight[k] * std::norm(s.coeffs[k]);
    total += e;
    if (mt.dealias[k] == 0.0) tail += e;
  }
  return total > 0 ? tail / total : 0.0;
}

} // namespace polyheat
