#include "polyheat/solver.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "polyheat/error.hpp"
#include "polyheat/kernel.hpp"
#include "polyheat/kernels.hpp"

namespace polyheat {

const char* to_string(Scheme s) { return s == Scheme::imex1 ? "imex1" : "etdrk4"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "imex1" || name == "imex") return Scheme::imex1;
  if (name == "etdrk4") return Scheme::etdrk4;
  fail(ErrorKind::config, "unknown scheme '" + name + "'");
}

double SolverConfig::stabilization_value() const {
  if (stabilization) return *stabilization;
  return 1.1 * coefficient_bound(RegPath{path.f, path.n, PathVariant::full}, eps);
}

void SolverConfig::validate() const {
  require(m >= 1 && m <= 3, ErrorKind::invalid_argument, "solver order m must be 1, 2 or 3");
  require_eps(eps);
  require(path.n >= 0.0, ErrorKind::invalid_argument, "n must be >= 0");
  require(dt_init > 0.0, ErrorKind::invalid_argument, "dt_init must be positive");
  require(t_final > 0.0, ErrorKind::invalid_argument, "t_final must be positive");
  require(energy_tol >= 0.0, ErrorKind::invalid_argument, "energy_tol must be >= 0");
  require(max_halvings >= 0, ErrorKind::invalid_argument, "max_halvings must be >= 0");
  const double c = stabilization_value();
  require(c >= coefficient_bound(path, eps), ErrorKind::invalid_argument,
          "stabilization c must dominate the path coefficient");
  double last = 0.0;
  for (double t : snapshot_times) {
    require(t > last && t <= t_final, ErrorKind::invalid_argument,
            "snapshot_times must increase strictly within (0, t_final]");
    last = t;
  }
}

namespace {

struct Diagnostics {
  double dissipation = 0.0;  // int phi |g|^2
  double flux = 0.0;         // int |phi g|^2
  double gradient = 0.0;     // int |g|^2
};

// Nonlinear evaluation on a spectral state. Owns the scratch buffers so a
// step does not allocate per stage.
class Operator {
public:
  explicit Operator(const GridSpec& grid, const SolverConfig& cfg)
      : grid_(grid), cfg_(cfg), mt_(modes(grid)), c_(cfg.stabilization_value()),
        u_(grid.size()), phi_(grid.size()), g_(std::size_t(grid.dim), std::vector<double>(grid.size())),
        work_(grid) {
    const std::size_t n = spectrum_size(grid);
    lambda_.resize(n);
    for (std::size_t k = 0; k < n; ++k) lambda_[k] = std::pow(mt_.xi2[k], cfg.m);
    for (int d = 0; d < grid.dim; ++d) {
      // i xi_d (-|xi|^2)^{m-1}: symbol of d/dx_d Delta^{m-1}.
      std::vector<cplx> s(n);
      for (std::size_t k = 0; k < n; ++k)
        s[k] = cplx(0.0, mt_.xi_odd[std::size_t(d)][k]) * std::pow(-mt_.xi2[k], cfg.m - 1);
      grad_symbol_.push_back(std::move(s));
    }
  }

  const std::vector<double>& lambda() const { return lambda_; }
  double c() const { return c_; }

  /// rhs_hat of (-1)^{m-1} div(phi grad Delta^{m-1} u).
  void rhs_hat(const Spectrum& v, Spectrum& out, Diagnostics* diag = nullptr) {
    inverse_into(v, u_);
    for (double x : u_)
      if (!std::isfinite(x)) fail(ErrorKind::blow_up, "non-finite value in solution; run aborted");
    par::evaluate_coefficient(u_, cfg_.path, cfg_.eps, phi_);
    out.grid = grid_;
    out.coeffs.assign(v.size(), cplx(0.0, 0.0));
    const double sign = cfg_.m % 2 == 1 ? 1.0 : -1.0;
    double dis = 0.0, flux = 0.0, grad = 0.0;
    for (int d = 0; d < grid_.dim; ++d) {
      auto& g = g_[std::size_t(d)];
      work_.coeffs = v.coeffs;
      par::multiply(work_.coeffs, grad_symbol_[std::size_t(d)]);
      inverse_into(work_, g);
      if (diag)
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double gg = g[i] * g[i];
          grad += gg;
          dis += phi_[i] * gg;
          flux += phi_[i] * phi_[i] * gg;
        }
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= phi_[i];
      forward_from(g, work_);
      const auto& xi = mt_.xi_odd[std::size_t(d)];
      for (std::size_t k = 0; k < v.size(); ++k) {
        const double mask = cfg_.dealias ? mt_.dealias[k] : 1.0;
        out.coeffs[k] += sign * mask * cplx(0.0, xi[k]) * work_.coeffs[k];
      }
    }
    if (diag) {
      const double dv = grid_.cell_volume();
      diag->dissipation = dis * dv;
      diag->flux = flux * dv;
      diag->gradient = grad * dv;
    }
    for (double x : phi_)
      if (!std::isfinite(x)) fail(ErrorKind::blow_up, "non-finite coefficient; run aborted");
  }

  /// N_hat = rhs_hat + c |xi|^{2m} v_hat.
  void remainder_hat(const Spectrum& v, Spectrum& out, Diagnostics* diag = nullptr) {
    rhs_hat(v, out, diag);
    for (std::size_t k = 0; k < v.size(); ++k) out.coeffs[k] += c_ * lambda_[k] * v.coeffs[k];
  }

private:
  GridSpec grid_;
  const SolverConfig& cfg_;
  const ModeTable& mt_;
  double c_;
  std::vector<double> lambda_;
  std::vector<std::vector<cplx>> grad_symbol_;
  std::vector<double> u_, phi_;
  std::vector<std::vector<double>> g_;
  Spectrum work_;
};

struct EtdCoefficients {
  std::vector<double> e, e2, q, f1, f2, f3;
};

// Contour-integral evaluation of the phi-functions (32 points on the unit
// circle around each z = -c lambda dt) avoids cancellation for small |z|.
EtdCoefficients etd_coefficients(const std::vector<double>& lambda, double c, double dt) {
  constexpr int contour = 32;
  const double pi = std::acos(-1.0);
  std::vector<cplx> roots(contour);
  for (int j = 0; j < contour; ++j) roots[std::size_t(j)] = std::exp(cplx(0.0, pi * (j + 0.5) / contour));
  EtdCoefficients k;
  const std::size_t n = lambda.size();
  k.e.resize(n); k.e2.resize(n); k.q.resize(n); k.f1.resize(n); k.f2.resize(n); k.f3.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z0 = -c * lambda[i] * dt;
    k.e[i] = std::exp(z0);
    k.e2[i] = std::exp(0.5 * z0);
    cplx q = 0, f1 = 0, f2 = 0, f3 = 0;
    for (const cplx& r : roots) {
      const cplx z = z0 + r;
      const cplx ez = std::exp(z), ez2 = std::exp(0.5 * z);
      const cplx z3 = z * z * z;
      q += (ez2 - 1.0) / z;
      f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      f2 += (2.0 + z + ez * (z - 2.0)) / z3;
      f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    // Conjugate symmetry of the contour: the mean over the upper half is real.
    k.q[i] = dt * q.real() / contour;
    k.f1[i] = dt * f1.real() / contour;
    k.f2[i] = dt * f2.real() / contour;
    k.f3[i] = dt * f3.real() / contour;
  }
  return k;
}

const EtdCoefficients& cached_coefficients(const GridSpec& g, int m, const std::vector<double>& lambda,
                                           double c, double dt) {
  using Key = std::tuple<int, int, double, int, double, double>;
  thread_local std::map<Key, EtdCoefficients> cache;
  const Key key{g.dim, g.points, g.half_width, m, c, dt};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key, etd_coefficients(lambda, c, dt)).first->second;
}

double energy_of(const Spectrum& s, const std::vector<double>& factor) {
  return spectral_energy(s, factor);
}

std::vector<double> power_factor(const GridSpec& g, double exponent) {
  return tabulate_symbol(g, [exponent](double xi2) {
    if (xi2 == 0.0) return exponent == 0.0 ? 1.0 : 0.0;
    return std::pow(xi2, exponent);
  });
}

// Single update of the chosen scheme from v with step dt; n0 = N_hat(v).
void advance(Operator& op, const GridSpec& g, const SolverConfig& cfg, Scheme scheme,
             const Spectrum& v, const Spectrum& n0, double dt, Spectrum& out) {
  const auto& lambda = op.lambda();
  const double c = op.c();
  out.grid = g;
  out.coeffs.resize(v.size());
  if (scheme == Scheme::imex1) {
    for (std::size_t k = 0; k < v.size(); ++k)
      out.coeffs[k] = std::exp(-c * lambda[k] * dt) * (v.coeffs[k] + dt * n0.coeffs[k]);
    return;
  }
  const EtdCoefficients& e = cached_coefficients(g, cfg.m, lambda, c, dt);
  const std::size_t n = v.size();
  Spectrum a(g), b(g), cc(g), na, nb, nc;
  for (std::size_t k = 0; k < n; ++k) a.coeffs[k] = e.e2[k] * v.coeffs[k] + e.q[k] * n0.coeffs[k];
  op.remainder_hat(a, na);
  for (std::size_t k = 0; k < n; ++k) b.coeffs[k] = e.e2[k] * v.coeffs[k] + e.q[k] * na.coeffs[k];
  op.remainder_hat(b, nb);
  for (std::size_t k = 0; k < n; ++k)
    cc.coeffs[k] = e.e2[k] * a.coeffs[k] + e.q[k] * (2.0 * nb.coeffs[k] - n0.coeffs[k]);
  op.remainder_hat(cc, nc);
  for (std::size_t k = 0; k < n; ++k)
    out.coeffs[k] = e.e[k] * v.coeffs[k] + e.f1[k] * n0.coeffs[k] +
                    2.0 * e.f2[k] * (na.coeffs[k] + nb.coeffs[k]) + e.f3[k] * nc.coeffs[k];
}

struct ControlledStep {
  Spectrum v;
  double dt_used = 0.0;
  int halvings = 0;
};

// Halve dt until the BF energy does not grow by more than energy_tol * e_ref.
ControlledStep controlled_step(Operator& op, const GridSpec& g, const SolverConfig& cfg,
                               Scheme scheme, const Spectrum& v, const Spectrum& n0, double dt,
                               const std::vector<double>& factor, double e_ref,
                               std::size_t* rejected = nullptr) {
  const double e_old = energy_of(v, factor);
  ControlledStep r;
  double last_growth = 0.0;
  for (int h = 0; h <= cfg.max_halvings; ++h) {
    bool finite = true;
    try {
      advance(op, g, cfg, scheme, v, n0, dt, r.v);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::blow_up) throw;
      finite = false;
    }
    const double e_new = finite ? energy_of(r.v, factor) : NAN;
    if (finite && std::isfinite(e_new) && e_new - e_old <= cfg.energy_tol * e_ref) {
      r.dt_used = dt;
      r.halvings = h;
      return r;
    }
    last_growth = e_new - e_old;
    if (rejected) ++*rejected;
    dt *= 0.5;
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "stiffness failure: step rejected after %d halvings (dt = %.3e, energy growth %.3e, "
                "tolerance %.3e)",
                cfg.max_halvings, dt * 2.0, last_growth, cfg.energy_tol * e_ref);
  fail(ErrorKind::stiffness, buf);
}

StepResult step_with(const Field& u, double dt, const SolverConfig& config, Scheme scheme) {
  config.validate();
  require(dt > 0.0, ErrorKind::invalid_argument, "dt must be positive");
  Operator op(u.grid, config);
  const Spectrum v = forward(u);
  Spectrum n0;
  op.remainder_hat(v, n0);
  const auto factor = power_factor(u.grid, config.m - 1);
  const double e0 = energy_of(v, factor);
  ControlledStep s = controlled_step(op, u.grid, config, scheme, v, n0, dt, factor, e0);
  return {inverse(s.v, u.time + s.dt_used), s.dt_used, s.halvings};
}

} // namespace

BfEnergies bf_energies(const Field& u, int m) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  const Spectrum s = forward(u);
  BfEnergies e;
  e.bf_energy = spectral_energy(s, power_factor(u.grid, m - 1));
  e.bf_lower = m >= 2 ? spectral_energy(s, power_factor(u.grid, m - 2)) : 0.0;
  e.mass = integrate(u);
  return e;
}

Field rhs(const Field& u, const SolverConfig& config) {
  config.validate();
  Operator op(u.grid, config);
  Spectrum out;
  op.rhs_hat(forward(u), out);
  return inverse(out, u.time);
}

StepResult step_imex(const Field& u, double dt, const SolverConfig& config) {
  return step_with(u, dt, config, Scheme::imex1);
}

StepResult step_etdrk4(const Field& u, double dt, const SolverConfig& config) {
  return step_with(u, dt, config, Scheme::etdrk4);
}

double flux_accumulate(const Field& u, const SolverConfig& config, double dt, double running) {
  config.validate();
  Operator op(u.grid, config);
  Spectrum out;
  Diagnostics d;
  op.rhs_hat(forward(u), out, &d);
  return running + dt * d.flux;
}

Trajectory solve(const Field& u0, const SolverConfig& config, const StepObserver& observer) {
  config.validate();
  const GridSpec& g = u0.grid;
  require(all_finite(u0), ErrorKind::invalid_argument, "initial data must be finite");
  if (config.check_decay) assert_decay(u0, config.decay_tol, "initial data");
  const double tail = spectral_tail_fraction(forward(u0));
  require(tail < 1e-10, ErrorKind::under_resolved,
          "initial data under-resolved: spectral tail fraction " + std::to_string(tail));
  Operator op(g, config);
  const auto factor = power_factor(g, config.m - 1);
  const auto lower = config.m >= 2 ? power_factor(g, config.m - 2) : std::vector<double>{};

  Trajectory traj;
  Spectrum v = forward(u0);
  Spectrum n0;
  Diagnostics diag;
  op.remainder_hat(v, n0, &diag);

  const double mass0 = integrate(u0);
  const double mass_scale = std::abs(mass0) > 0 ? std::abs(mass0) : std::max(l2_norm(u0), 1e-300);
  const double sup0 = max_abs(u0);
  const double e0 = energy_of(v, factor);
  const double e_ref = e0 > 0 ? e0 : 1.0;

  EnergyReport rep;
  rep.t = u0.time;
  rep.mass = mass0;
  rep.bf_energy = e0;
  rep.bf_lower = lower.empty() ? 0.0 : energy_of(v, lower);
  traj.energy.push_back(rep);
  traj.sup_abs = sup0;

  std::vector<double> targets = config.snapshot_times;
  if (targets.empty() || targets.back() < config.t_final) targets.push_back(config.t_final);

  double t = 0.0;
  double dt = config.dt_init;
  Field u(g);
  for (double target : targets) {
    while (t < target) {
      double dt_try = std::min(dt, target - t);
      // Absorb rounding slivers so the run lands exactly on the target.
      if (target - t - dt_try < 1e-6 * dt_try) dt_try = target - t;
      const bool landing = t + dt_try >= target;
      ControlledStep s = controlled_step(op, g, config, config.scheme, v, n0, dt_try, factor, e_ref,
                                         &traj.rejected_steps);
      const bool reached = landing && s.halvings == 0;
      t = reached ? target : t + s.dt_used;
      v = std::move(s.v);
      ++traj.accepted_steps;
      // Let dt recover after a halving, but never beyond dt_init.
      if (s.halvings > 0) dt = std::min(config.dt_init, 2.0 * s.dt_used);

      Diagnostics next;
      op.remainder_hat(v, n0, &next);
      rep.t = t;
      rep.bf_energy = energy_of(v, factor);
      rep.bf_lower = lower.empty() ? 0.0 : energy_of(v, lower);
      rep.dissipation_accum += 0.5 * s.dt_used * (diag.dissipation + next.dissipation);
      rep.flux_l2_accum += 0.5 * s.dt_used * (diag.flux + next.flux);
      rep.gradient_accum += 0.5 * s.dt_used * (diag.gradient + next.gradient);
      rep.dissipation_residual = std::abs(rep.bf_energy + 2.0 * rep.dissipation_accum - e0);
      diag = next;

      inverse_into(v, u.values);
      u.time = t;
      rep.mass = integrate(u);
      traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(rep.mass - mass0) / mass_scale);
      traj.max_energy_increase =
          std::max(traj.max_energy_increase, rep.bf_energy - traj.energy.back().bf_energy);
      const double sup = max_abs(u);
      traj.sup_abs = std::max(traj.sup_abs, sup);
      if (sup > config.boundedness_factor * sup0) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "boundedness tripwire: sup|u| = %.6g exceeds %.3g * sup|u0| = %.6g at t = %.6g",
                      sup, config.boundedness_factor, config.boundedness_factor * sup0, t);
        fail(ErrorKind::boundedness, buf);
      }
      traj.energy.push_back(rep);
      if (observer) observer(t, u);
    }
    if (config.check_decay) assert_decay(u, config.decay_tol, "snapshot");
    traj.snapshots.push_back(u);
  }
  return traj;
}

InterfaceReport interface_report(const Field& u, double threshold, double k_half_width) {
  require(threshold > 0.0, ErrorKind::invalid_argument, "interface threshold must be positive");
  const GridSpec& g = u.grid;
  InterfaceReport r;
  std::size_t support = 0;
  double min_k = INFINITY;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u.values[i]) > threshold) ++support;
    const Point p = point_of(g, i);
    bool in_k = true;
    for (int d = 0; d < g.dim; ++d) in_k = in_k && std::abs(p[std::size_t(d)]) <= k_half_width;
    if (in_k) min_k = std::min(min_k, u.values[i]);
  }
  r.support_measure = double(support) * g.cell_volume();
  const int M = g.points;
  if (g.dim == 1) {
    r.sign_change_count = sign_changes(u.values, threshold);
  } else {
    std::vector<double> row(static_cast<std::size_t>(M)), col(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
      row[std::size_t(j)] = u.values[std::size_t(M / 2) * M + j];
      col[std::size_t(j)] = u.values[std::size_t(j) * M + M / 2];
    }
    r.sign_change_count = sign_changes(row, threshold) + sign_changes(col, threshold);
  }
  require(std::isfinite(min_k), ErrorKind::invalid_argument, "compact set K contains no grid point");
  r.min_on_K = min_k;
  r.positivity_on_K = min_k > 0.0;
  return r;
}

std::string energy_csv(const std::vector<EnergyReport>& series) {
  std::ostringstream out;
  out << "t,mass,bf_energy,bf_lower,flux_l2_accum,dissipation_accum,dissipation_residual\n";
  char buf[512];
  for (const auto& r : series) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.mass,
                  r.bf_energy, r.bf_lower, r.flux_l2_accum, r.dissipation_accum,
                  r.dissipation_residual);
    out << buf;
  }
  return out.str();
}

} // namespace polyheat
