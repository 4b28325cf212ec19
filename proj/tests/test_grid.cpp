#include <doctest.h>

#include <cmath>
#include <numbers>

#include "polyheat/grid.hpp"
#include "polyheat/spectral.hpp"

using namespace polyheat;

TEST_SUITE("gridfield") {

TEST_CASE("grid construction validates its inputs") {
  CHECK_NOTHROW(make_grid(1, 20.0, 8));
  CHECK_THROWS_WITH(make_grid(1, 20.0, 7), doctest::Contains("points_per_dim must be even"));
  CHECK_THROWS_AS(make_grid(1, 20.0, 6), Error);
  CHECK_THROWS_AS(make_grid(1, -1.0, 64), Error);
  CHECK_THROWS_AS(make_grid(3, 1.0, 64), Error);
  const GridSpec g = make_grid(2, 10.0, 64);
  CHECK(g.size() == 64u * 64u);
  CHECK(g.coord(0) == doctest::Approx(-10.0));
  CHECK(g.coord(32) == doctest::Approx(0.0));
}

TEST_CASE("laplacian of a box eigenmode") {
  const GridSpec g = make_grid(1, 20.0, 128);
  const double k = std::numbers::pi / 20.0;
  const Field u = sample(g, [&](const Point& p) { return std::sin(k * p[0]); });
  const Field lap = laplacian_power(u, 1);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(lap[i] + k * k * u[i]));
  CHECK(err <= 1e-10);
  const Field bi = laplacian_power(u, 2);
  // Roundoff in the top modes is amplified by |xi_max|^4 ~ 1e4.
  double err4 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) err4 = std::max(err4, std::abs(bi[i] - k * k * k * k * u[i]));
  CHECK(err4 <= 1e-10);
}

TEST_CASE("gradient and divergence in two dimensions") {
  const GridSpec g = make_grid(2, 8.0, 128);
  const Field u = sample(g, [](const Point& p) { return std::exp(-(p[0] * p[0] + 2 * p[1] * p[1])); });
  const VectorField grad = gradient(u);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point p = point_of(g, i);
    err = std::max(err, std::abs(grad.components[0][i] + 2 * p[0] * u[i]));
    err = std::max(err, std::abs(grad.components[1][i] + 4 * p[1] * u[i]));
  }
  CHECK(err <= 1e-9);
  const Field div = divergence(grad);
  const Field lap = laplacian_power(u, 1);
  double e2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e2 = std::max(e2, std::abs(div[i] - lap[i]));
  CHECK(e2 <= 1e-9);
  CHECK(std::abs(integrate(div)) <= 1e-12);
}

TEST_CASE("integration and norms") {
  const GridSpec g = make_grid(1, 15.0, 256);
  const Field u = sample(g, [](const Point& p) { return std::exp(-p[0] * p[0]); });
  CHECK(integrate(u) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(l2_norm(u) == doctest::Approx(std::pow(std::numbers::pi / 2, 0.25)).epsilon(1e-12));
  CHECK(inner(u, u) == doctest::Approx(l2_norm(u) * l2_norm(u)));
  // Parseval through the transform matches the physical-space sum.
  CHECK(spectral_energy(forward(u)) == doctest::Approx(inner(u, u)).epsilon(1e-13));
  const Field two = 2.0 * u;
  CHECK(max_abs(two - u - u) == 0.0);
  CHECK(all_finite(u));
}

TEST_CASE("weighted norm guards overflow") {
  const GridSpec g = make_grid(1, 50.0, 128);
  const Field u(g);
  CHECK_THROWS_WITH(weighted_l2_norm(u, WeightSpec{1.0, 2.0, 1}), doctest::Contains("600"));
  CHECK_NOTHROW(weighted_l2_norm(u, WeightSpec{1.0, 2.0, -1}));
  const WeightSpec w = weight_for_order(2, 0.1, 1);
  CHECK(w.alpha == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("decay assertion") {
  const GridSpec g = make_grid(1, 10.0, 128);
  const Field narrow = sample(g, [](const Point& p) { return std::exp(-p[0] * p[0]); });
  CHECK_NOTHROW(assert_decay(narrow));
  const Field wide = sample(g, [](const Point& p) { return std::exp(-0.01 * p[0] * p[0]); });
  try {
    assert_decay(wide, 1e-8, "wide");
    FAIL("expected a decay violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::decay_violation);
    CHECK(std::string(e.what()).find("wide") != std::string::npos);
  }
}

TEST_CASE("grid mismatch is rejected") {
  const Field a(make_grid(1, 10.0, 64)), b(make_grid(1, 10.0, 128));
  CHECK_THROWS_AS(inner(a, b), Error);
  CHECK_THROWS_AS(a + b, Error);
}

TEST_CASE("dealias band and mode table") {
  const GridSpec g = make_grid(1, 10.0, 96);
  const ModeTable& mt = modes(g);
  REQUIRE(mt.xi2.size() == 49u);
  CHECK(mt.dealias[32] == 1.0);
  CHECK(mt.dealias[33] == 0.0);
  CHECK(mt.xi_odd[0][48] == 0.0);
  CHECK(mt.parseval_weight[0] == 1.0);
  CHECK(mt.parseval_weight[48] == 1.0);
  CHECK(mt.parseval_weight[10] == 2.0);
}

}
