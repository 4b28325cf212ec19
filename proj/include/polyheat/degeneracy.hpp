#pragma once

#include <span>
#include <string>
#include <vector>

namespace polyheat {

enum class DegeneracyKind { tanh, rational, exp_saturating, power, spline };

const char* to_string(DegeneracyKind kind);
DegeneracyKind degeneracy_kind_from_string(const std::string& name);

/// The nonlinearity f: continuous, strictly increasing, f(0) = 0, f > 0 on
/// (0, T_max], bounded by C_f. Built-in kinds act on t / scale. The power kind
/// t^kappa is unbounded; its C_f is f(T_max) over the asserted solution range.
class DegeneracyFunction {
public:
  static DegeneracyFunction tanh(double scale = 1.0);
  static DegeneracyFunction rational(double scale = 1.0);
  static DegeneracyFunction exp_saturating(double scale = 1.0);
  static DegeneracyFunction power(double kappa, double t_max = 10.0);
  /// Monotone cubic (Fritsch–Carlson) through (t_i, f_i); t_0 = 0, f_0 = 0,
  /// constant beyond the last knot.
  static DegeneracyFunction spline(std::vector<double> t, std::vector<double> f);

  DegeneracyKind kind() const { return kind_; }
  double operator()(double t) const;
  /// ln f(t), accurate for tiny t; -inf at t = 0.
  double log(double t) const;
  /// f^{-1}(y) for y in (0, C_f).
  double inverse(double y) const;
  double bound() const { return bound_; }
  bool unbounded() const { return unbounded_; }
  double t_max() const { return t_max_; }
  double scale() const { return scale_; }
  double kappa() const { return kappa_; }
  const std::vector<double>& knots_t() const { return knots_t_; }
  const std::vector<double>& knots_f() const { return knots_f_; }

private:
  DegeneracyFunction() = default;
  void check_admissible() const;

  DegeneracyKind kind_ = DegeneracyKind::rational;
  double scale_ = 1.0;
  double kappa_ = 1.0;
  double t_max_ = 10.0;
  double bound_ = 1.0;
  bool unbounded_ = false;
  std::vector<double> knots_t_, knots_f_, slopes_;
};

double f_eval(const DegeneracyFunction& f, double t);
/// f(t)^n evaluated as e^{n ln f}; 0 when n ln f < -700, and 1 when n = 0.
double f_pow_n(const DegeneracyFunction& f, double n, double t);

enum class PathVariant { full, simple };

const char* to_string(PathVariant v);
PathVariant path_variant_from_string(const std::string& name);

struct RegPath {
  DegeneracyFunction f = DegeneracyFunction::rational();
  double n = 0.0;
  PathVariant variant = PathVariant::full;
};

/// phi_eps(u) = f^n(eps) + (1 - eps) f^n(sqrt(eps^2 + u^2)).
double phi_eps(const RegPath& path, double eps, double u);
/// psi_eps(u) = f^n(sqrt(eps^2 + u^2)).
double psi_eps(const RegPath& path, double eps, double u);
/// Theta_{n,eps}(u) = 1 - psi_eps(u).
double theta(const RegPath& path, double eps, double u);
/// Dispatches on path.variant.
double coefficient(const RegPath& path, double eps, double u);
/// Upper bound of the coefficient over all u, used for the default stabilizer.
double coefficient_bound(const RegPath& path, double eps);

/// sup over {t : f(t) >= c0} of |(1 - f^n)/n + ln f|.
double log_expansion_residual(const DegeneracyFunction& f, double n,
                              std::span<const double> t_grid, double c0 = 1e-3);

void require_eps(double eps);

} // namespace polyheat
