#include "polyheat/degeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "polyheat/error.hpp"

namespace polyheat {

const char* to_string(DegeneracyKind kind) {
  switch (kind) {
    case DegeneracyKind::tanh: return "tanh";
    case DegeneracyKind::rational: return "rational";
    case DegeneracyKind::exp_saturating: return "exp_saturating";
    case DegeneracyKind::power: return "power";
    case DegeneracyKind::spline: return "spline";
  }
  return "unknown";
}

DegeneracyKind degeneracy_kind_from_string(const std::string& name) {
  if (name == "tanh") return DegeneracyKind::tanh;
  if (name == "rational") return DegeneracyKind::rational;
  if (name == "exp_saturating") return DegeneracyKind::exp_saturating;
  if (name == "power") return DegeneracyKind::power;
  if (name == "spline") return DegeneracyKind::spline;
  fail(ErrorKind::config, "unknown degeneracy kind '" + name + "'");
}

const char* to_string(PathVariant v) { return v == PathVariant::full ? "full" : "simple"; }

PathVariant path_variant_from_string(const std::string& name) {
  if (name == "full") return PathVariant::full;
  if (name == "simple") return PathVariant::simple;
  fail(ErrorKind::config, "unknown path variant '" + name + "'");
}

DegeneracyFunction DegeneracyFunction::tanh(double scale) {
  require(scale > 0, ErrorKind::invalid_argument, "tanh scale must be positive");
  DegeneracyFunction f;
  f.kind_ = DegeneracyKind::tanh;
  f.scale_ = scale;
  f.t_max_ = 10.0 * scale;
  f.bound_ = 1.0;
  f.check_admissible();
  return f;
}

DegeneracyFunction DegeneracyFunction::rational(double scale) {
  require(scale > 0, ErrorKind::invalid_argument, "rational scale must be positive");
  DegeneracyFunction f;
  f.kind_ = DegeneracyKind::rational;
  f.scale_ = scale;
  f.t_max_ = 10.0 * scale;
  f.bound_ = 1.0;
  f.check_admissible();
  return f;
}

DegeneracyFunction DegeneracyFunction::exp_saturating(double scale) {
  require(scale > 0, ErrorKind::invalid_argument, "exp_saturating scale must be positive");
  DegeneracyFunction f;
  f.kind_ = DegeneracyKind::exp_saturating;
  f.scale_ = scale;
  f.t_max_ = 10.0 * scale;
  f.bound_ = 1.0;
  f.check_admissible();
  return f;
}

DegeneracyFunction DegeneracyFunction::power(double kappa, double t_max) {
  require(kappa > 0, ErrorKind::invalid_argument, "power exponent kappa must be positive");
  require(t_max > 0, ErrorKind::invalid_argument, "power t_max must be positive");
  DegeneracyFunction f;
  f.kind_ = DegeneracyKind::power;
  f.kappa_ = kappa;
  f.t_max_ = t_max;
  f.unbounded_ = true;
  f.bound_ = std::pow(t_max, kappa);
  f.check_admissible();
  return f;
}

DegeneracyFunction DegeneracyFunction::spline(std::vector<double> t, std::vector<double> y) {
  require(t.size() == y.size() && t.size() >= 2, ErrorKind::invalid_argument,
          "spline needs matching t/f tables with at least two knots");
  require(t.front() == 0.0 && y.front() == 0.0, ErrorKind::invalid_argument,
          "spline must start at (0, 0)");
  for (std::size_t i = 1; i < t.size(); ++i) {
    require(t[i] > t[i - 1], ErrorKind::invalid_argument, "spline knots must increase");
    require(y[i] > y[i - 1], ErrorKind::invalid_argument, "spline values must strictly increase");
  }
  DegeneracyFunction f;
  f.kind_ = DegeneracyKind::spline;
  const std::size_t n = t.size();
  std::vector<double> delta(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
  m[0] = delta[0];
  m[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) m[i] = 0.5 * (delta[i - 1] + delta[i]);
  // Fritsch–Carlson limiter keeps the interpolant monotone.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = m[i] / delta[i], b = m[i + 1] / delta[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m[i] = tau * a * delta[i];
      m[i + 1] = tau * b * delta[i];
    }
  }
  f.knots_t_ = std::move(t);
  f.knots_f_ = std::move(y);
  f.slopes_ = std::move(m);
  f.t_max_ = f.knots_t_.back();
  f.bound_ = f.knots_f_.back();
  f.check_admissible();
  return f;
}

double DegeneracyFunction::operator()(double t) const {
  require(t >= 0.0, ErrorKind::invalid_argument, "f: argument must be >= 0 (pass |u|)");
  switch (kind_) {
    case DegeneracyKind::tanh: return std::tanh(t / scale_);
    case DegeneracyKind::rational: {
      const double x = t / scale_;
      return x / (1.0 + x);
    }
    case DegeneracyKind::exp_saturating: return -std::expm1(-t / scale_);
    case DegeneracyKind::power: return std::pow(t, kappa_);
    case DegeneracyKind::spline: {
      if (t >= knots_t_.back()) return knots_f_.back();
      const auto it = std::upper_bound(knots_t_.begin(), knots_t_.end(), t);
      const std::size_t i = std::size_t(it - knots_t_.begin()) - 1;
      const double h = knots_t_[i + 1] - knots_t_[i];
      const double s = (t - knots_t_[i]) / h;
      const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
      const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
      return h00 * knots_f_[i] + h10 * h * slopes_[i] + h01 * knots_f_[i + 1] +
             h11 * h * slopes_[i + 1];
    }
  }
  return 0.0;
}

double DegeneracyFunction::log(double t) const {
  require(t >= 0.0, ErrorKind::invalid_argument, "ln f: argument must be >= 0");
  if (t == 0.0) return -std::numeric_limits<double>::infinity();
  switch (kind_) {
    case DegeneracyKind::rational: {
      const double x = t / scale_;
      return std::log(x) - std::log1p(x);
    }
    case DegeneracyKind::power: return kappa_ * std::log(t);
    default: return std::log((*this)(t));
  }
}

double DegeneracyFunction::inverse(double y) const {
  require(y > 0.0 && y < bound_ + (unbounded_ ? 1e300 : 0.0), ErrorKind::invalid_argument,
          "f^{-1}: target outside (0, C_f)");
  switch (kind_) {
    case DegeneracyKind::tanh: return scale_ * std::atanh(y);
    case DegeneracyKind::rational: return scale_ * y / (1.0 - y);
    case DegeneracyKind::exp_saturating: return -scale_ * std::log1p(-y);
    case DegeneracyKind::power: return std::pow(y, 1.0 / kappa_);
    case DegeneracyKind::spline: {
      double lo = 0.0, hi = knots_t_.back();
      for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((*this)(mid) < y ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

void DegeneracyFunction::check_admissible() const {
  constexpr int samples = 10000;
  require((*this)(0.0) == 0.0, ErrorKind::invalid_argument, "f(0) must be 0");
  double previous = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double t = t_max_ * i / samples;
    const double v = (*this)(t);
    require(std::isfinite(v) && v > 0.0, ErrorKind::invalid_argument,
            "f must be positive on (0, T_max]");
    require(v > previous || (kind_ != DegeneracyKind::spline && v == previous && v == bound_),
            ErrorKind::invalid_argument, "f must be strictly increasing on [0, T_max]");
    require(v <= bound_ * (1 + 1e-12), ErrorKind::invalid_argument, "f exceeds its bound C_f");
    previous = v;
  }
}

double f_eval(const DegeneracyFunction& f, double t) { return f(t); }

double f_pow_n(const DegeneracyFunction& f, double n, double t) {
  require(n >= 0.0, ErrorKind::invalid_argument, "n must be >= 0");
  if (n == 0.0) return 1.0;
  const double lf = f.log(t);
  const double e = n * lf;
  if (e < -700.0) return 0.0;
  return std::exp(e);
}

void require_eps(double eps) {
  require(eps > 0.0 && eps <= 1.0, ErrorKind::invalid_argument, "eps must lie in (0, 1]");
}

double phi_eps(const RegPath& path, double eps, double u) {
  require_eps(eps);
  return f_pow_n(path.f, path.n, eps) +
         (1.0 - eps) * f_pow_n(path.f, path.n, std::hypot(eps, u));
}

double psi_eps(const RegPath& path, double eps, double u) {
  require_eps(eps);
  return f_pow_n(path.f, path.n, std::hypot(eps, u));
}

double theta(const RegPath& path, double eps, double u) { return 1.0 - psi_eps(path, eps, u); }

double coefficient(const RegPath& path, double eps, double u) {
  return path.variant == PathVariant::full ? phi_eps(path, eps, u) : psi_eps(path, eps, u);
}

double coefficient_bound(const RegPath& path, double eps) {
  const double cf = path.n == 0.0 ? 1.0 : std::pow(path.f.bound(), path.n);
  return path.variant == PathVariant::full ? f_pow_n(path.f, path.n, eps) + cf : cf;
}

double log_expansion_residual(const DegeneracyFunction& f, double n,
                              std::span<const double> t_grid, double c0) {
  require(n > 0.0, ErrorKind::invalid_argument, "expansion residual needs n > 0");
  require(c0 > 0.0, ErrorKind::invalid_argument, "c0 must be positive");
  double sup = 0.0;
  for (double t : t_grid) {
    if (t <= 0.0 || f(t) < c0) continue;
    const double lf = f.log(t);
    // (1 - f^n)/n = -expm1(n ln f)/n, formed without cancellation.
    const double r = std::abs(-std::expm1(n * lf) / n + lf);
    sup = std::max(sup, r);
  }
  return sup;
}

} // namespace polyheat
