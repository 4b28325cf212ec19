#include "polyheat/polynomial.hpp"

#include <cmath>
#include <numeric>

#include "polyheat/error.hpp"

namespace polyheat {

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_)
    require(e >= 0, ErrorKind::invalid_argument, "multi-index entries must be >= 0");
}

int MultiIndex::order() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

std::uint64_t MultiIndex::factorial() const {
  require(order() <= 20, ErrorKind::invalid_argument, "beta! is exact only for |beta| <= 20");
  std::uint64_t f = 1;
  for (int e : entries_)
    for (int k = 2; k <= e; ++k) f *= std::uint64_t(k);
  return f;
}

std::vector<MultiIndex> multi_indices_up_to(int dim, int max_order) {
  require(dim == 1 || dim == 2, ErrorKind::invalid_argument, "multi-indices for N = 1 or 2");
  require(max_order >= 0, ErrorKind::invalid_argument, "max_order must be >= 0");
  std::vector<MultiIndex> out;
  for (int k = 0; k <= max_order; ++k) {
    if (dim == 1) out.emplace_back(std::vector<int>{k});
    else
      for (int a = k; a >= 0; --a) out.emplace_back(std::vector<int>{a, k - a});
  }
  return out;
}

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) fail(ErrorKind::invalid_argument, "rational overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) fail(ErrorKind::invalid_argument, "rational overflow");
  return r;
}

} // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  require(den != 0, ErrorKind::invalid_argument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

Rational operator+(const Rational& a, const Rational& b) {
  const std::int64_t g = std::gcd(a.den_, b.den_);
  const std::int64_t da = a.den_ / g, db = b.den_ / g;
  return Rational(checked_add(checked_mul(a.num_, db), checked_mul(b.num_, da)),
                  checked_mul(a.den_, db));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  const std::int64_t g1 = std::gcd(a.num_, b.den_) ? std::gcd(a.num_, b.den_) : 1;
  const std::int64_t g2 = std::gcd(b.num_, a.den_) ? std::gcd(b.num_, a.den_) : 1;
  return Rational(checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  require(!b.is_zero(), ErrorKind::invalid_argument, "rational division by zero");
  return a * Rational(b.den_, b.num_);
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Polynomial Polynomial::monomial(const MultiIndex& alpha, Rational c) {
  Polynomial p(alpha.dim());
  p.add_term(alpha, c);
  return p;
}

Polynomial Polynomial::constant(int dim, Rational c) {
  return monomial(MultiIndex(std::vector<int>(std::size_t(dim), 0)), c);
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [alpha, c] : terms_) d = std::max(d, alpha.order());
  return d;
}

Rational Polynomial::coefficient(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const MultiIndex& alpha, const Rational& c) {
  require(alpha.dim() == dim_, ErrorKind::invalid_argument, "monomial dimension mismatch");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.emplace(alpha, c);
  if (inserted) return;
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require(other.dim_ == dim_, ErrorKind::invalid_argument, "polynomial dimension mismatch");
  require(other.scale_ == scale_, ErrorKind::invalid_argument,
          "adding polynomials with different scales");
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
  return *this;
}

Polynomial operator*(const Rational& c, const Polynomial& p) {
  Polynomial out(p.dim_);
  out.scale_ = p.scale_;
  for (const auto& [alpha, v] : p.terms_) out.add_term(alpha, c * v);
  return out;
}

double Polynomial::evaluate(const Point& y) const {
  double sum = 0.0;
  for (const auto& [alpha, c] : terms_) {
    double mono = 1.0;
    for (int d = 0; d < dim_; ++d) mono *= std::pow(y[std::size_t(d)], alpha[d]);
    sum += c.to_double() * mono;
  }
  return scale_ * sum;
}

Field Polynomial::sample(const GridSpec& grid) const {
  require(grid.dim == dim_, ErrorKind::grid_mismatch, "polynomial and grid dimensions differ");
  return polyheat::sample(grid, [this](const Point& y) { return evaluate(y); });
}

Polynomial laplacian(const Polynomial& p) {
  Polynomial out(p.dim());
  out.set_scale(p.scale());
  for (const auto& [alpha, c] : p.terms()) {
    for (int d = 0; d < p.dim(); ++d) {
      const int e = alpha[d];
      if (e < 2) continue;
      std::vector<int> lowered = alpha.entries();
      lowered[std::size_t(d)] -= 2;
      out.add_term(MultiIndex(lowered), Rational(std::int64_t(e) * (e - 1)) * c);
    }
  }
  return out;
}

Polynomial euler_operator(const Polynomial& p) {
  Polynomial out(p.dim());
  out.set_scale(p.scale());
  for (const auto& [alpha, c] : p.terms()) out.add_term(alpha, Rational(alpha.order()) * c);
  return out;
}

nlohmann::json to_json(const Polynomial& p) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [alpha, c] : p.terms()) {
    list.push_back({{"exponents", alpha.entries()},
                    {"coeff", p.scale() * c.to_double()},
                    {"exact", {c.num(), c.den()}},
                    {"scale", p.scale()}});
  }
  return list;
}

namespace {

// Continued-fraction approximation for coefficients given only as floats.
Rational rational_of(double v) {
  require(std::isfinite(v), ErrorKind::config, "polynomial coefficient must be finite");
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double x = v;
  for (int i = 0; i < 40; ++i) {
    const double a = std::floor(x);
    if (std::abs(a) > 1e12) break;
    const auto ai = std::int64_t(a);
    const std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > 1000000000) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    if (std::abs(double(h1) / double(k1) - v) <= 1e-15 * std::max(1.0, std::abs(v))) break;
    const double frac = x - a;
    if (frac == 0.0) break;
    x = 1.0 / frac;
  }
  return Rational(h1, k1);
}

} // namespace

Polynomial polynomial_from_json(const nlohmann::json& j) {
  require(j.is_array(), ErrorKind::config, "polynomial JSON must be a list of terms");
  int dim = -1;
  double scale = 1.0;
  bool have_scale = false;
  Polynomial out(1);
  for (const auto& term : j) {
    require(term.is_object() && term.contains("exponents") && term.contains("coeff"),
            ErrorKind::config, "polynomial term needs 'exponents' and 'coeff'");
    const auto exps = term.at("exponents").get<std::vector<int>>();
    if (dim < 0) {
      dim = int(exps.size());
      out = Polynomial(dim);
    }
    require(int(exps.size()) == dim, ErrorKind::config, "inconsistent exponent lengths");
    Rational c;
    if (term.contains("exact")) {
      const auto nd = term.at("exact").get<std::vector<std::int64_t>>();
      require(nd.size() == 2, ErrorKind::config, "'exact' must be [num, den]");
      c = Rational(nd[0], nd[1]);
      const double s = term.value("scale", 1.0);
      require(!have_scale || s == scale, ErrorKind::config, "inconsistent polynomial scale");
      scale = s;
      have_scale = true;
    } else {
      c = rational_of(term.at("coeff").get<double>());
    }
    out.add_term(MultiIndex(exps), c);
  }
  out.set_scale(scale);
  return out;
}

} // namespace polyheat
