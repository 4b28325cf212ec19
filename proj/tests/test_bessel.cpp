#include <doctest.h>

#include <cmath>

#include "polyheat/bessel.hpp"
#include "polyheat/quadrature.hpp"

using namespace polyheat;

TEST_SUITE("bessel") {

TEST_CASE("integer orders against the standard library") {
  for (int n : {0, 1, 2, 5})
    for (double z : {0.0, 0.3, 1.0, 4.0, 11.5, 12.5, 20.0, 47.0, 150.0}) {
      INFO("n=" << n << " z=" << z);
      CHECK(std::abs(bessel_j(n, z) - std::cyl_bessel_j(double(n), z)) <= 1e-12);
    }
}

TEST_CASE("half-integer orders use closed forms") {
  for (double z : {0.5, 2.0, 13.0, 60.0}) {
    CHECK(bessel_j(-0.5, z) == doctest::Approx(std::sqrt(2 / (M_PI * z)) * std::cos(z)).epsilon(1e-13));
    CHECK(bessel_j(0.5, z) == doctest::Approx(std::sqrt(2 / (M_PI * z)) * std::sin(z)).epsilon(1e-13));
    CHECK(std::abs(bessel_j(2.5, z) - std::cyl_bessel_j(2.5, z)) <= 1e-12);
  }
}

TEST_CASE("integral representation cross-check at z = 10") {
  for (int n : {0, 1, 3})
    CHECK(std::abs(bessel_j(n, 10.0) - bessel_j_integral(n, 10.0)) <= 1e-10);
}

TEST_CASE("series and asymptotic agree in the overlap") {
  CHECK(std::abs(bessel_j_series(0, 12.0) - bessel_j_asymptotic(0, 12.0)) <= 1e-10);
  CHECK(std::abs(bessel_j_series(1, 12.0) - bessel_j_asymptotic(1, 12.0)) <= 1e-10);
}

TEST_CASE("Gauss–Legendre integrates polynomials exactly") {
  const GaussRule& r = gauss_legendre(16);
  double sum = 0.0, x8 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    sum += r.weights[i];
    x8 += r.weights[i] * std::pow(r.nodes[i], 8);
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x8 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(composite_gauss([](double x) { return std::exp(-x); }, 0.0, 20.0, 8) ==
        doctest::Approx(1.0 - std::exp(-20.0)).epsilon(1e-14));
}

}
