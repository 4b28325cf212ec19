#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polyheat/kernel.hpp"
#include "polyheat/quadrature.hpp"
#include "polyheat/spectral.hpp"

using namespace polyheat;

namespace {

// Independent oracle for N = 1: (1/pi) int_0^S e^{-s^{2m}} cos(rs) ds by an
// adaptive Simpson rule, no Gauss nodes or Bessel code involved.
double simpson(const auto& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double oracle_1d(int m, double r) {
  auto f = [&](double s) { return std::exp(-std::pow(s, 2 * m)) * std::cos(r * s); };
  const double a = 0, b = 8;
  const double fa = f(a), fm = f(4), fb = f(b);
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 1e-14, 40) / std::numbers::pi;
}

} // namespace

TEST_SUITE("kernel") {

TEST_CASE("Gaussian values at r = 0 and r = 2") {
  const QuadratureSpec q = default_quadrature(1);
  CHECK(profile_value(1, 1, 0.0, q) == doctest::Approx(0.2820948).epsilon(1e-7));
  CHECK(profile_value(1, 1, 2.0, q) == doctest::Approx(0.1037769).epsilon(1e-6));
  CHECK(profile_value(1, 2, 1.0, q) ==
        doctest::Approx(std::exp(-0.25) / (4 * std::numbers::pi)).epsilon(1e-10));
  CHECK(profile_value(1, 3, 1.5, q) ==
        doctest::Approx(std::exp(-1.5 * 1.5 / 4) * std::pow(4 * std::numbers::pi, -1.5)).epsilon(1e-9));
}

TEST_CASE("m = 2 against an adaptive-quadrature oracle") {
  const QuadratureSpec q = default_quadrature(2);
  for (double r : {0.0, 0.7, 3.0, 6.5}) {
    INFO("r=" << r);
    CHECK(std::abs(profile_value(2, 1, r, q) - oracle_1d(2, std::max(r, 1e-8))) <= 1e-10);
  }
  CHECK(profile_value(2, 1, 0.0, q) ==
        doctest::Approx(std::tgamma(1.25) / std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("oscillation for m >= 2") {
  const QuadratureSpec q = default_quadrature(2);
  const KernelProfile p = profile_bessel(2, 1, uniform_radii(10.0, 0.1), q);
  CHECK(sign_changes(p.values) > 0);
  CHECK(*std::min_element(p.values.begin(), p.values.end()) < 0.0);
  const KernelProfile g = profile_bessel(1, 1, uniform_radii(10.0, 0.1), default_quadrature(1));
  CHECK(sign_changes(g.values) == 0);
}

TEST_CASE("quadrature precondition on s_max") {
  CHECK_THROWS_AS(profile_value(2, 1, 1.0, QuadratureSpec{2.0, 256}), Error);
}

TEST_CASE("Fourier route reproduces the Gaussian and has unit mass") {
  const GridSpec g = make_grid(1, 30.0, 256);
  const Field F = profile_fourier(1, g);
  double err = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double x = point_of(g, i)[0];
    err = std::max(err, std::abs(F[i] - std::exp(-x * x / 4) / std::sqrt(4 * std::numbers::pi)));
  }
  CHECK(err <= 1e-8);
  CHECK(std::abs(integrate(profile_fourier(2, g)) - 1.0) <= 1e-6);
  CHECK_THROWS_AS(profile_fourier(2, make_grid(1, 200.0, 64)), Error);
}

TEST_CASE("fundamental solution scaling and mass") {
  const GridSpec g = make_grid(1, 40.0, 512);
  const Field h1 = fundamental_solution(1, g, 1.0);
  CHECK(std::abs(h1[256] - 1 / std::sqrt(4 * std::numbers::pi)) <= 1e-12);
  const Field h = fundamental_solution(2, g, 2.0);
  CHECK(std::abs(integrate(h) - 1.0) <= 1e-6);
  const QuadratureSpec q = default_quadrature(2);
  const double s = std::pow(2.0, -0.25);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); i += 7) {
    const double x = point_of(g, i)[0];
    if (std::abs(x) > 15) continue;
    err = std::max(err, std::abs(h[i] - s * profile_value(2, 1, std::abs(x) * s, q)));
  }
  CHECK(err <= 1e-10);
  CHECK_THROWS_AS(fundamental_solution(2, g, 1e-6), Error);   // unresolved
  CHECK_THROWS_AS(fundamental_solution(2, make_grid(1, 5.0, 64), 50.0), Error);  // leaks
}

TEST_CASE("phe_solve: identity, eigenmode decay, semigroup, mass") {
  const GridSpec g = make_grid(1, 20.0, 256);
  const Field u0 = sample(g, [](const Point& p) { return std::exp(-p[0] * p[0]) * (1 + p[0]); });
  CHECK(phe_solve(u0, 2, 0.0).values == u0.values);
  const Field a = phe_solve(phe_solve(u0, 2, 0.03), 2, 0.05);
  const Field b = phe_solve(u0, 2, 0.08);
  CHECK(l2_norm(a - b) <= 1e-12 * l2_norm(b));
  CHECK(integrate(b) == doctest::Approx(integrate(u0)).epsilon(1e-14));

  const double k = 3 * std::numbers::pi / 20.0;
  PhSolutionOperator op(g, 2);
  const Field mode = sample(g, [&](const Point& p) { return std::cos(k * p[0]); });
  const Field decayed = op.apply(mode, 0.1);
  const double factor = std::exp(-std::pow(k, 4) * 0.1);
  for (std::size_t i = 0; i < g.size(); i += 17) CHECK(decayed[i] == doctest::Approx(factor * mode[i]).scale(1e-12));
  for (double s : op.symbol()) CHECK(s >= 0.0);
}

TEST_CASE("decay fit on the Gaussian") {
  const KernelProfile p = profile_bessel(1, 1, uniform_radii(12.0, 0.05), default_quadrature(1));
  const DecayFit f = decay_fit(p);
  CHECK(f.alpha == doctest::Approx(2.0).epsilon(0.025));
  CHECK(f.a == doctest::Approx(0.25).epsilon(0.04));
  KernelProfile shortp = profile_bessel(2, 1, uniform_radii(6.0, 0.05), default_quadrature(2));
  CHECK_THROWS_WITH(decay_fit(shortp), doctest::Contains("insufficient decay range"));
}

TEST_CASE("profile mass") {
  CHECK(std::abs(profile_mass(1, 1, 15.0, default_quadrature(1)) - 1.0) <= 1e-10);
  CHECK(std::abs(profile_mass(1, 2, 15.0, default_quadrature(1)) - 1.0) <= 1e-10);
}

TEST_CASE("CSV layout") {
  KernelProfile p = profile_bessel(1, 1, uniform_radii(1.0, 0.5), default_quadrature(1));
  p.fit = DecayFit{1.0, 0.25, 2.0, 5};
  const std::string csv = to_csv(p);
  CHECK(csv.rfind("# m=1 N=1 s_max=", 0) == 0);
  CHECK(csv.find("\nr,F\n") != std::string::npos);
  CHECK(csv.find("# fit C=1 a=0.25 alpha=2") != std::string::npos);
}

}
