#pragma once

namespace polyheat {

/// Bessel function of the first kind J_nu(z), z >= 0, nu >= -1/2.
/// Half-integer orders use the closed trigonometric forms; other orders the
/// power series for z <= 12 and the Hankel asymptotic expansion beyond.
double bessel_j(double nu, double z);

double bessel_j_series(double nu, double z);
double bessel_j_asymptotic(double nu, double z);

/// J_n(z) = (1/pi) int_0^pi cos(n tau - z sin tau) dtau by the periodic
/// trapezoid rule; independent route used for cross-checks.
double bessel_j_integral(int n, double z, int nodes = 256);

} // namespace polyheat
