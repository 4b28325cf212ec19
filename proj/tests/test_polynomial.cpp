#include <doctest.h>

#include "polyheat/polynomial.hpp"

using namespace polyheat;

TEST_SUITE("polynomial") {

TEST_CASE("multi-index bookkeeping") {
  const MultiIndex b({3, 2});
  CHECK(b.order() == 5);
  CHECK(b.factorial() == 12u);
  CHECK(MultiIndex({12}).factorial() == 479001600u);
  CHECK(multi_indices_up_to(1, 4).size() == 5u);
  CHECK(multi_indices_up_to(2, 3).size() == 10u);
  CHECK_THROWS_AS(MultiIndex({-1}), Error);
}

TEST_CASE("rational arithmetic is exact and normalized") {
  const Rational a(6, -4);
  CHECK(a.num() == -3);
  CHECK(a.den() == 2);
  CHECK(a + Rational(3, 2) == Rational(0));
  CHECK(Rational(1, 3) * Rational(3, 7) == Rational(1, 7));
  CHECK(Rational(1, 3) / Rational(2, 3) == Rational(1, 2));
  CHECK(Rational(5, 10).str() == "1/2");
  CHECK_THROWS_AS(Rational(1, 0), Error);
  CHECK_THROWS_AS(Rational(INT64_MAX) + Rational(1), Error);
}

TEST_CASE("laplacian and euler operator") {
  Polynomial p(2);
  p.add_term(MultiIndex({2, 2}), Rational(1));
  p.add_term(MultiIndex({0, 3}), Rational(2));
  const Polynomial l = laplacian(p);
  CHECK(l.coefficient(MultiIndex({0, 2})) == Rational(2));
  CHECK(l.coefficient(MultiIndex({2, 0})) == Rational(2));
  CHECK(l.coefficient(MultiIndex({0, 1})) == Rational(12));
  const Polynomial e = euler_operator(p);
  CHECK(e.coefficient(MultiIndex({2, 2})) == Rational(4));
  CHECK(e.coefficient(MultiIndex({0, 3})) == Rational(6));
  CHECK(p.degree() == 4);
  CHECK(Polynomial(1).degree() == -1);
}

TEST_CASE("cancellation removes zero terms") {
  Polynomial p = Polynomial::monomial(MultiIndex({2}));
  p += Rational(-1) * Polynomial::monomial(MultiIndex({2}));
  CHECK(p.terms().empty());
}

TEST_CASE("evaluation and JSON round trip") {
  Polynomial p(1);
  p.add_term(MultiIndex({2}), Rational(1));
  p.add_term(MultiIndex({0}), Rational(-2));
  p.set_scale(0.5);
  CHECK(p.evaluate({3.0, 0.0}) == doctest::Approx(3.5));
  const auto j = to_json(p);
  CHECK(j.is_array());
  CHECK(j[0].contains("exponents"));
  CHECK(j[0].contains("coeff"));
  CHECK(polynomial_from_json(j) == p);
  nlohmann::json plain = nlohmann::json::array({{{"exponents", {1}}, {"coeff", 0.25}}});
  CHECK(polynomial_from_json(plain).coefficient(MultiIndex({1})) == Rational(1, 4));
}

}
