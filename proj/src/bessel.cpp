#include "polyheat/bessel.hpp"

#include <cmath>

#include "polyheat/error.hpp"

namespace polyheat {
namespace {

constexpr double series_limit = 12.0;

bool is_half_integer(double nu) {
  const double twice = 2.0 * nu;
  return std::abs(twice - std::round(twice)) < 1e-14 && std::abs(std::fmod(std::round(twice), 2.0)) == 1.0;
}

} // namespace

double bessel_j_series(double nu, double z) {
  const double h = 0.5 * z;
  double term = std::pow(h, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  const double h2 = h * h;
  for (int k = 0; k < 500; ++k) {
    term *= -h2 / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (k > h && std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_j_asymptotic(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double a = 1.0;  // a_k(nu) / z^k
  double previous = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= (mu - odd * odd) / (k * 8.0 * z);
    if (std::abs(a) > previous) break;  // the series started to diverge
    previous = std::abs(a);
    const int r = k % 4;
    if (r == 1) q += a;
    else if (r == 2) p -= a;
    else if (r == 3) q -= a;
    else p += a;
    if (std::abs(a) < 1e-17) break;
  }
  const double chi = z - (0.5 * nu + 0.25) * M_PI;
  return std::sqrt(2.0 / (M_PI * z)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_j(double nu, double z) {
  require(z >= 0.0, ErrorKind::invalid_argument, "bessel_j: z must be >= 0");
  require(nu >= -0.5, ErrorKind::invalid_argument, "bessel_j: order must be >= -1/2");
  if (is_half_integer(nu)) {
    require(z > 0.0 || nu > 0, ErrorKind::invalid_argument, "bessel_j: J_{-1/2} is singular at 0");
    if (z == 0.0) return 0.0;
    const double pre = std::sqrt(2.0 / (M_PI * z));
    double jm = pre * std::cos(z);  // J_{-1/2}
    if (nu < 0) return jm;
    double j = pre * std::sin(z);   // J_{1/2}
    if (z < nu + 1.0) return bessel_j_series(nu, z);
    for (double order = 0.5; order < nu - 0.25; order += 1.0) {
      const double next = (2.0 * order / z) * j - jm;
      jm = j;
      j = next;
    }
    return j;
  }
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return z <= series_limit ? bessel_j_series(nu, z) : bessel_j_asymptotic(nu, z);
}

double bessel_j_integral(int n, double z, int nodes) {
  double sum = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const double tau = 2.0 * M_PI * j / nodes;
    sum += std::cos(n * tau - z * std::sin(tau));
  }
  return sum / nodes;
}

} // namespace polyheat
