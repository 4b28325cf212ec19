#pragma once

#include <complex>
#include <span>
#include <vector>

#include "polyheat/grid.hpp"

namespace polyheat {

using cplx = std::complex<double>;

/// Half-spectrum of a real field in FFTW r2c layout: the last dimension keeps
/// M/2 + 1 entries. Forward transform is unnormalized, inverse carries 1/M^N.
struct Spectrum {
  GridSpec grid;
  std::vector<cplx> coeffs;

  Spectrum() = default;
  explicit Spectrum(const GridSpec& g);
  std::size_t size() const { return coeffs.size(); }
};

std::size_t spectrum_size(const GridSpec& grid);

/// Per-mode wavevector tables for one grid, shared read-only between threads.
struct ModeTable {
  GridSpec grid;
  /// xi[d][k]: wavevector component d of half-spectrum mode k.
  std::vector<std::vector<double>> xi;
  /// Same with the Nyquist entry zeroed; used for odd multipliers.
  std::vector<std::vector<double>> xi_odd;
  std::vector<double> xi2;
  /// Parseval multiplicity of each stored mode (1 or 2).
  std::vector<double> parseval_weight;
  /// 1 inside the 2/3-rule band, 0 outside.
  std::vector<double> dealias;
  /// Largest |integer wavenumber| of the mode over dimensions.
  std::vector<int> kmax;
};

const ModeTable& modes(const GridSpec& grid);

Spectrum forward(const Field& u);
Field inverse(const Spectrum& s, double time = 0.0);
/// Inverse transform of the raw values only; avoids building a Field.
void inverse_into(const Spectrum& s, std::span<double> out);
void forward_from(std::span<const double> values, Spectrum& out);

/// dx^N * sum |u|^2 computed from Fourier coefficients, with an optional
/// per-mode real factor applied to |u_hat|^2.
double spectral_energy(const Spectrum& s, std::span<const double> factor = {});

/// Real symbol sigma(xi) tabulated over the half-spectrum.
template <class Fn>
std::vector<double> tabulate_symbol(const GridSpec& grid, Fn&& fn) {
  const ModeTable& mt = modes(grid);
  std::vector<double> out(mt.xi2.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(mt.xi2[k]);
  return out;
}

/// Fraction of spectral energy carried by modes outside the 2/3 band.
double spectral_tail_fraction(const Spectrum& s);

} // namespace polyheat
