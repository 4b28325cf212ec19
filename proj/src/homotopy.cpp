#include "polyheat/homotopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "polyheat/error.hpp"
#include "polyheat/kernel.hpp"
#include "polyheat/kernels.hpp"
#include "polyheat/spectral.hpp"

namespace polyheat {

const char* to_string(ScheduleKind k) { return k == ScheduleKind::n_of_eps ? "n_of_eps" : "eps_of_n"; }

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "n_of_eps") return ScheduleKind::n_of_eps;
  if (name == "eps_of_n") return ScheduleKind::eps_of_n;
  fail(ErrorKind::config, "unknown schedule kind '" + name + "'");
}

ScheduleValue schedule_eval(const Schedule& s, double parameter) {
  require(s.c > 0, ErrorKind::invalid_argument, "schedule constant c must be positive");
  ScheduleValue v;
  if (s.kind == ScheduleKind::eps_of_n) {
    require(parameter > 0, ErrorKind::schedule_range, "schedule out of range: n must be positive");
    const double log_target = -s.c / std::sqrt(parameter);
    const double target = std::exp(log_target);
    if (!(target > std::numeric_limits<double>::min()))
      fail(ErrorKind::schedule_range,
           "schedule out of range: f^{-1} target e^{-c/sqrt(n)} underflows at n = " +
               std::to_string(parameter));
    if (!(target < s.f.bound()) && !s.f.unbounded())
      fail(ErrorKind::schedule_range, "schedule out of range: target exceeds C_f");
    v.n = parameter;
    v.eps = s.f.inverse(target);
    if (!(v.eps > 0.0) || v.eps > 1.0)
      fail(ErrorKind::schedule_range,
           "schedule out of range: eps(n) = " + std::to_string(v.eps) + " not in (0, 1]");
    v.product = v.n * std::abs(s.f.log(v.eps));
  } else {
    require(parameter > 0 && parameter <= 1.0, ErrorKind::schedule_range,
            "schedule out of range: eps must lie in (0, 1]");
    const double lf = s.f.log(parameter);
    if (!(lf < 0.0) || !std::isfinite(lf))
      fail(ErrorKind::schedule_range, "schedule out of range: ln f(eps) must be finite and negative");
    v.eps = parameter;
    v.n = s.c / std::sqrt(-lf);
    v.product = v.n * (-lf);
  }
  return v;
}

void check_schedule_trend(const Schedule& s, const std::vector<double>& parameters) {
  std::vector<double> p = parameters;
  std::sort(p.begin(), p.end(), std::greater<>());
  double last = std::numeric_limits<double>::quiet_NaN();
  for (double x : p) {
    const double prod = schedule_eval(s, x).product;
    if (!std::isnan(last)) {
      const bool ok = s.kind == ScheduleKind::eps_of_n ? prod < last : prod > last;
      if (!ok)
        fail(ErrorKind::schedule_range,
             std::string("schedule product trend violated for ") + to_string(s.kind) +
                 " at parameter " + std::to_string(x));
    }
    last = prod;
  }
}

namespace {

double student_t95(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof < 1) return std::numeric_limits<double>::infinity();
  return dof <= 30 ? table[dof - 1] : 1.96;
}

double l2_diff(const Field& a, const Field& b) { return l2_norm(a - b); }

double sup_diff(const Field& a, const Field& b) { return max_abs(a - b); }

} // namespace

SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorKind::invalid_argument, "slope fit size mismatch");
  SlopeFit f;
  f.points = int(x.size());
  if (x.size() < 2) return f;
  const double n = double(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0, ErrorKind::invalid_argument, "log slope needs positive data");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() > 2) {
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = std::log(y[i]) - (f.intercept + f.slope * std::log(x[i]));
      sse += e * e;
    }
    const double se = std::sqrt(sse / (n - 2) / sxx);
    f.ci_half_width = student_t95(int(x.size()) - 2) * se;
  } else {
    f.ci_half_width = std::numeric_limits<double>::infinity();
  }
  return f;
}

CorrectionField correction_phi(const Field& u0, int m, const DegeneracyFunction& f, double t,
                               int time_nodes, double clamp_floor, double max_clamped_fraction) {
  require(m >= 1, ErrorKind::invalid_argument, "order m must be >= 1");
  require(t >= 0.0, ErrorKind::invalid_argument, "correction time must be >= 0");
  require(time_nodes >= 2, ErrorKind::invalid_argument, "correction needs at least 2 time nodes");
  require(clamp_floor > 0.0, ErrorKind::invalid_argument, "clamp floor must be positive");
  const GridSpec& g = u0.grid;
  CorrectionField c;
  c.grid = g;
  c.t = t;
  c.clamp_floor = clamp_floor;
  c.time_nodes = time_nodes;
  c.values = Field(g, t);
  const ModeTable& mt = modes(g);
  const std::size_t ns = spectrum_size(g);
  std::vector<double> lambda(ns);
  for (std::size_t k = 0; k < ns; ++k) lambda[k] = std::pow(mt.xi2[k], m);
  auto clamped_measure = [&](const std::vector<double>& u) {
    std::size_t count = 0;
    for (double v : u)
      if (std::abs(v) < clamp_floor) ++count;
    return double(count) / double(u.size());
  };
  const Spectrum u0_hat = forward(u0);
  if (t == 0.0) {
    c.clamped_fraction = clamped_measure(u0.values);
    c.clamped_fraction_spacetime = c.clamped_fraction;
  } else {
    std::vector<std::vector<cplx>> grad_symbol;
    for (int d = 0; d < g.dim; ++d) {
      std::vector<cplx> s(ns);
      for (std::size_t k = 0; k < ns; ++k)
        s[k] = cplx(0.0, mt.xi_odd[std::size_t(d)][k]) * std::pow(-mt.xi2[k], m - 1);
      grad_symbol.push_back(std::move(s));
    }
    Spectrum acc(g), work(g), ups(g);
    std::vector<double> u(g.size()), gfield(g.size()), w(g.size());
    const double h = t / (time_nodes - 1);
    double spacetime = 0.0;
    for (int j = 0; j < time_nodes; ++j) {
      const double s = j == time_nodes - 1 ? t : j * h;
      const double weight = (j == 0 || j == time_nodes - 1) ? 0.5 * h : h;
      for (std::size_t k = 0; k < ns; ++k) ups.coeffs[k] = u0_hat.coeffs[k] * std::exp(-lambda[k] * s);
      inverse_into(ups, u);
      const double frac = clamped_measure(u);
      if (j > 0) spacetime += frac;
      if (j == time_nodes - 1) c.clamped_fraction = frac;
      const double tau = t - s;
      for (int d = 0; d < g.dim; ++d) {
        work.coeffs = ups.coeffs;
        par::multiply(work.coeffs, grad_symbol[std::size_t(d)]);
        inverse_into(work, gfield);
        par::log_source(u, gfield, f, clamp_floor, w);
        forward_from(w, work);
        const auto& xi = mt.xi_odd[std::size_t(d)];
        for (std::size_t k = 0; k < ns; ++k)
          acc.coeffs[k] += weight * mt.dealias[k] * cplx(0.0, xi[k]) * std::exp(-lambda[k] * tau) *
                           work.coeffs[k];
      }
    }
    c.clamped_fraction_spacetime = spacetime / (time_nodes - 1);
    inverse_into(acc, c.values.values);
  }
  require(all_finite(c.values), ErrorKind::log_singularity, "correction field is not finite");
  if (c.clamped_fraction > max_clamped_fraction) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "log-singularity dominates: correction unreliable (clamped fraction %.4f > %.2f)",
                  c.clamped_fraction, max_clamped_fraction);
    fail(ErrorKind::log_singularity, buf);
  }
  return c;
}

int select_phi_sign(const CorrectionField& correction, const Field& u_ph,
                    const std::vector<ConvergenceRow>& rows) {
  double err_plus = 0.0, err_minus = 0.0;
  int used = 0;
  for (const auto& r : rows) {
    if (r.failed || r.n <= 0.0) continue;
    require_same_grid(r.u.grid, u_ph.grid);
    for (std::size_t i = 0; i < u_ph.size(); ++i) {
      const double emp = (r.u.values[i] - u_ph.values[i]) / r.n;
      const double phi = correction.values.values[i];
      err_plus += (emp - phi) * (emp - phi);
      err_minus += (emp + phi) * (emp + phi);
    }
    ++used;
  }
  require(used > 0, ErrorKind::invalid_argument, "sign selection needs at least one n > 0 row");
  return err_plus <= err_minus ? 1 : -1;
}

BranchingResidual branching_residual(const Field& u_n, const Field& u_ph, const Field& phi,
                                     double n) {
  require_same_grid(u_n.grid, u_ph.grid);
  require_same_grid(u_n.grid, phi.grid);
  Field r(u_n.grid);
  for (std::size_t i = 0; i < r.size(); ++i)
    r.values[i] = u_n.values[i] - u_ph.values[i] - n * phi.values[i];
  BranchingResidual b;
  b.linear_gap = l2_norm(r);
  b.remainder_ratio = n > 0.0 ? b.linear_gap / n : 0.0;
  return b;
}

namespace {

// Very-weak residual of the limit equation against low Fourier modes chi:
// int u(T) chi - int u0 chi + int_0^T int u (-Delta)^m chi.
class VeryWeakMonitor {
public:
  VeryWeakMonitor(const Field& u0, int m) : grid_(u0.grid) {
    const double L = grid_.half_width;
    const double pi = std::acos(-1.0);
    for (int k = 1; k <= 3; ++k) {
      const double xi = pi * k / L;
      for (int kind = 0; kind < 2; ++kind) {
        Field chi = sample(grid_, [&](const Point& p) {
          const double arg = xi * p[0];
          return kind == 0 ? std::cos(arg) : std::sin(arg);
        });
        Field lchi = std::pow(xi * xi, m) * chi;
        tests_.push_back(std::move(chi));
        lstar_.push_back(std::move(lchi));
      }
    }
    initial_.resize(tests_.size());
    accum_.assign(tests_.size(), 0.0);
    last_.resize(tests_.size());
    for (std::size_t i = 0; i < tests_.size(); ++i) {
      initial_[i] = inner(u0, tests_[i]);
      last_[i] = inner(u0, lstar_[i]);
    }
  }

  void observe(double t, const Field& u) {
    const double dt = t - last_t_;
    for (std::size_t i = 0; i < tests_.size(); ++i) {
      const double cur = inner(u, lstar_[i]);
      accum_[i] += 0.5 * dt * (last_[i] + cur);
      last_[i] = cur;
    }
    last_t_ = t;
  }

  double residual(const Field& u_final) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < tests_.size(); ++i)
      worst = std::max(worst, std::abs(inner(u_final, tests_[i]) - initial_[i] + accum_[i]));
    return worst;
  }

private:
  GridSpec grid_;
  std::vector<Field> tests_, lstar_;
  std::vector<double> initial_, accum_, last_;
  double last_t_ = 0.0;
};

ConvergenceRow run_row(const Field& u0, const Field& u_ph, const DegeneracyFunction& f,
                       const Schedule& schedule, const SweepOptions& opt, double parameter,
                       const CorrectionField* correction, int phi_sign) {
  ConvergenceRow row;
  row.t_eval = opt.t_eval;
  row.correction_gap = std::numeric_limits<double>::quiet_NaN();
  try {
    SolverConfig cfg;
    cfg.m = opt.m;
    if (parameter == 0.0) {
      row.n = 0.0;
      row.eps = 1.0;
    } else {
      const ScheduleValue v = schedule_eval(schedule, parameter);
      row.n = v.n;
      row.eps = v.eps;
    }
    cfg.path = RegPath{f, row.n, opt.variant};
    cfg.eps = row.eps;
    cfg.dt_init = opt.dt;
    cfg.t_final = opt.t_eval;
    cfg.scheme = opt.scheme;
    cfg.dealias = opt.dealias;
    cfg.stabilization = opt.stabilization;
    // Intermediate snapshots keep the far-field guard active along the run.
    cfg.snapshot_times = {0.25 * opt.t_eval, 0.5 * opt.t_eval, 0.75 * opt.t_eval, opt.t_eval};
    VeryWeakMonitor monitor(u0, opt.m);
    const Trajectory traj =
        solve(u0, cfg, [&monitor](double t, const Field& u) { monitor.observe(t, u); });
    row.u = traj.final_state();
    row.l2_gap = l2_diff(row.u, u_ph);
    row.sup_gap = sup_diff(row.u, u_ph);
    row.very_weak_residual = monitor.residual(row.u);
    if (correction) {
      Field phi = double(phi_sign) * correction->values;
      row.correction_gap = branching_residual(row.u, u_ph, phi, row.n).linear_gap;
    }
  } catch (const std::exception& e) {
    row.failed = true;
    row.failure = e.what();
  }
  return row;
}

} // namespace

ConvergenceTable sweep(const Field& u0, const DegeneracyFunction& f, const Schedule& schedule,
                       const SweepOptions& options, const CorrectionField* correction,
                       int phi_sign) {
  require(!options.n_values.empty(), ErrorKind::invalid_argument, "sweep needs at least one n value");
  require(u0.grid.dim == 1 || u0.grid.dim == 2, ErrorKind::invalid_argument, "sweep grid must be 1-D or 2-D");
  const Field u_ph = phe_solve(u0, options.m, options.t_eval);
  if (correction) require_same_grid(correction->grid, u0.grid);
  std::vector<double> params = options.n_values;
  std::vector<ConvergenceRow> rows(params.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < params.size(); i = next++)
      rows[i] = run_row(u0, u_ph, f, schedule, options, params[i], correction, phi_sign);
  };
  const int workers = std::max(1, std::min<int>(options.workers, int(params.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  ConvergenceTable table;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ConvergenceRow& a, const ConvergenceRow& b) { return a.n > b.n; });
  table.rows = std::move(rows);
  table.schedule = std::string(to_string(schedule.kind)) + "(c=" + std::to_string(schedule.c) + ")";
  // Slope over the three smallest positive n.
  std::vector<double> xs, ys;
  for (auto it = table.rows.rbegin(); it != table.rows.rend() && xs.size() < 3; ++it)
    if (!it->failed && it->n > 0.0 && it->l2_gap > 0.0) {
      xs.push_back(it->n);
      ys.push_back(it->l2_gap);
    }
  table.slope = fit_log_slope(xs, ys);
  return table;
}

PerturbationReport perturbation_smallness_report(const std::vector<Field>& trajectory,
                                                 const DegeneracyFunction& f, double n,
                                                 double eps, double t1, double t2,
                                                 std::optional<double> expected_product) {
  require(t1 > 0 && t2 > 0, ErrorKind::invalid_argument, "thresholds must be positive");
  require_eps(eps);
  PerturbationReport r;
  r.n = n;
  r.eps = eps;
  r.threshold_t1 = t1;
  r.threshold_t2 = t2;
  r.product = n * std::abs(f.log(eps));
  const RegPath path{f, n, PathVariant::simple};
  for (const Field& u : trajectory)
    for (double v : u.values) {
      const double rad = std::hypot(eps, v);
      const double th = theta(path, eps, v);
      if (rad <= t1) r.sup_theta_near = std::max(r.sup_theta_near, th);
      else r.sup_theta_far = std::max(r.sup_theta_far, th);
      if (rad > t2) r.sup_theta_far_t2 = std::max(r.sup_theta_far_t2, th);
    }
  r.theta_at_zero = 1.0 - f_pow_n(f, n, eps);
  r.far_bound = 1.0 - f_pow_n(f, n, t1);
  r.expansion_residual = std::abs(r.theta_at_zero - r.product);
  r.product_matches_schedule =
      expected_product ? std::abs(r.product - *expected_product) <= 1e-12 * std::max(1.0, *expected_product)
                       : true;
  return r;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

} // namespace

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "n,eps,t_eval,l2_gap,sup_gap,correction_gap,very_weak_residual,failed,failure\n";
  for (const auto& r : table.rows)
    out << num(r.n) << ',' << num(r.eps) << ',' << num(r.t_eval) << ',' << num(r.l2_gap) << ','
        << num(r.sup_gap) << ',' << num(r.correction_gap) << ',' << num(r.very_weak_residual) << ','
        << (r.failed ? 1 : 0) << ',' << csv_escape(r.failure) << '\n';
  return out.str();
}

std::string plot_data_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "log_n,log_l2_gap,log_correction_gap\n";
  for (const auto& r : table.rows) {
    if (r.failed || r.n <= 0.0 || r.l2_gap <= 0.0) continue;
    out << num(std::log(r.n)) << ',' << num(std::log(r.l2_gap)) << ','
        << (std::isnan(r.correction_gap) || r.correction_gap <= 0 ? std::string("nan")
                                                                  : num(std::log(r.correction_gap)))
        << '\n';
  }
  return out.str();
}

nlohmann::json sweep_summary(const ConvergenceTable& table, int sign_of_phi,
                             double clamped_fraction) {
  nlohmann::json j;
  j["slope"] = table.slope.slope;
  j["slope_ci"] = {table.slope.slope - table.slope.ci_half_width,
                   table.slope.slope + table.slope.ci_half_width};
  j["slope_points"] = table.slope.points;
  j["sign_of_phi"] = sign_of_phi;
  j["clamped_fraction"] = clamped_fraction;
  j["schedule"] = table.schedule;
  std::size_t failed = 0;
  for (const auto& r : table.rows) failed += r.failed ? 1 : 0;
  j["rows"] = table.rows.size();
  j["failed_rows"] = failed;
  return j;
}

} // namespace polyheat
