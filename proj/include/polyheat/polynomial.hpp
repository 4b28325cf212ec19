#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyheat/grid.hpp"

namespace polyheat {

/// beta in N_0^N.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);

  int dim() const { return int(entries_.size()); }
  int order() const;
  int operator[](int i) const { return entries_[std::size_t(i)]; }
  const std::vector<int>& entries() const { return entries_; }
  /// beta! = prod beta_i!, exact for |beta| <= 20.
  std::uint64_t factorial() const;

  auto operator<=>(const MultiIndex&) const = default;

private:
  std::vector<int> entries_;
};

/// All multi-indices of dimension `dim` with |beta| <= max_order, graded order.
std::vector<MultiIndex> multi_indices_up_to(int dim, int max_order);

/// Exact rational with 64-bit parts; arithmetic throws on overflow.
class Rational {
public:
  Rational(std::int64_t num = 0, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return double(num_) / double(den_); }
  bool is_zero() const { return num_ == 0; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }
  friend bool operator==(const Rational&, const Rational&) = default;

  std::string str() const;

private:
  std::int64_t num_, den_;
};

/// Polynomial in N variables with exact rational coefficients times a real
/// scale; value = scale * sum c_alpha y^alpha. Zero coefficients are never stored.
class Polynomial {
public:
  explicit Polynomial(int dim = 1) : dim_(dim) {}

  static Polynomial monomial(const MultiIndex& alpha, Rational c = Rational(1));
  static Polynomial constant(int dim, Rational c);

  int dim() const { return dim_; }
  int degree() const;
  double scale() const { return scale_; }
  void set_scale(double s) { scale_ = s; }
  const std::map<MultiIndex, Rational>& terms() const { return terms_; }
  Rational coefficient(const MultiIndex& alpha) const;

  void add_term(const MultiIndex& alpha, const Rational& c);
  Polynomial& operator+=(const Polynomial& other);
  friend Polynomial operator*(const Rational& c, const Polynomial& p);

  /// Exact equality of the rational parts and scales.
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  double evaluate(const Point& y) const;
  Field sample(const GridSpec& grid) const;

private:
  int dim_;
  double scale_ = 1.0;
  std::map<MultiIndex, Rational> terms_;
};

Polynomial laplacian(const Polynomial& p);
/// sum_i y_i d/dy_i, which multiplies y^alpha by |alpha|.
Polynomial euler_operator(const Polynomial& p);

nlohmann::json to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j);

} // namespace polyheat
