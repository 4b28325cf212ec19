// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "polyheat/config.hpp"
#include "polyheat/homotopy.hpp"
#include "polyheat/kernel.hpp"
#include "polyheat/runner.hpp"
#include "polyheat/spectral_theory.hpp"

using namespace polyheat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Field gaussian(const GridSpec& g, double center = 0.0, double width = 1.0) {
  return sample(g, [&](const Point& p) {
    const double z = (p[0] - center) / width;
    return std::exp(-z * z);
  });
}

struct Case {
  int m, dim;
};
const Case kernel_cases[] = {{1, 1}, {2, 1}, {3, 1}, {2, 2}};

Outcome ac1() {
  Outcome o{true, ""};
  for (const Case& c : kernel_cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const double r_max = c.m == 1 ? 15.0 : 40.0;
    const double err = std::abs(profile_mass(c.m, c.dim, r_max, default_quadrature(c.m)) - 1.0);
    const double s = seconds_since(t0);
    o.pass = o.pass && err <= 1e-6 && s < 10.0;
    o.detail += fmt("(m=%d,N=%d) |mass-1|=%.2e in %.2fs; ", c.m, c.dim, err, s);
  }
  return o;
}

Outcome ac2() {
  double worst = 0.0;
  const QuadratureSpec q = default_quadrature(1);
  for (int dim = 1; dim <= 3; ++dim)
    for (double r = 0.0; r <= 10.0 + 1e-12; r += 0.01) {
      const double exact = std::pow(4 * std::numbers::pi, -0.5 * dim) * std::exp(-r * r / 4);
      worst = std::max(worst, std::abs(profile_value(1, dim, r, q) - exact));
    }
  return {worst <= 1e-8, fmt("max pointwise error %.2e over N=1,2,3, r<=10", worst)};
}

Outcome ac3() {
  Outcome o{true, ""};
  for (const Case& c : kernel_cases) {
    const GridSpec g = make_grid(c.dim, 40.0, c.dim == 1 ? 512 : 256);
    const Field F = profile_fourier(c.m, g);
    const QuadratureSpec q = default_quadrature(c.m);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = norm(point_of(g, i), c.dim);
      if (r > 10.0) continue;
      worst = std::max(worst, std::abs(F[i] - profile_value(c.m, c.dim, r, q)));
    }
    o.pass = o.pass && worst <= 1e-5;
    o.detail += fmt("(m=%d,N=%d) %.2e; ", c.m, c.dim, worst);
  }
  return o;
}

Outcome ac4() {
  Outcome o{true, ""};
  for (int m = 1; m <= 3; ++m) {
    const KernelProfile p =
        profile_bessel(m, 1, uniform_radii(m == 1 ? 12.0 : 45.0, 0.02), default_quadrature(m));
    const DecayFit f = decay_fit(p);
    const double expected = 2.0 * m / (2.0 * m - 1.0);
    const double rel = (f.alpha - expected) / expected;
    o.pass = o.pass && std::abs(rel) <= 0.05;
    o.detail += fmt("m=%d alpha=%.4f (expected %.4f, %+.2f%%); ", m, f.alpha, expected, 100 * rel);
  }
  return o;
}

Outcome ac5() {
  const GridSpec g = make_grid(1, 40.0, 256);
  double worst = 0.0;
  for (int k = 0; k <= 4; ++k) worst = std::max(worst, eigen_residual(MultiIndex({k}), 2, g));
  bool exact = true;
  for (const MultiIndex& b : multi_indices_up_to(1, 8)) {
    const Polynomial p = adjoint_eigenpolynomial(b, 2);
    exact = exact && apply_L_star(p, 2) == eigenvalue_exact(b, 2) * p;
    exact = exact && eigenvalue_exact(b, 2) == Rational(-b.order(), 4);
  }
  const Biorthogonality bio = biorthogonality_matrix(0, 2, make_grid(1, 50.0, 256));
  const double g00 = bio.at(0, 0);
  return {worst <= 1e-4 && exact && std::abs(g00 - 1.0) <= 1e-6,
          fmt("max residual %.2e, L* exact for |beta|<=8: %s, <psi_0,psi*_0>=%.12f", worst,
              exact ? "yes" : "no", g00)};
}

Outcome ac6() {
  const GridSpec g = make_grid(1, 26.0, 256);
  const Field u0 = gaussian(g);
  SolverConfig c;
  c.m = 2;
  c.path = RegPath{DegeneracyFunction::rational(), 0.0, PathVariant::full};
  c.eps = 1.0;
  c.dt_init = 1e-4;
  c.t_final = 0.5;
  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory tr = solve(u0, c);
  const double s = seconds_since(t0);
  const Field exact = phe_solve(u0, 2, 0.5);
  const double gap = l2_norm(tr.final_state() - exact) / l2_norm(exact);
  return {gap <= 1e-6 && s < 30.0, fmt("relative l2 gap %.2e at t=0.5 in %.2fs", gap, s)};
}

Outcome ac7() {
  const GridSpec g = make_grid(1, 24.0, 1024);
  SolverConfig c;
  c.m = 2;
  c.path = RegPath{DegeneracyFunction::rational(), 0.2, PathVariant::full};
  c.eps = 1e-3;
  c.dt_init = 1e-4;
  c.t_final = 0.2;
  // Intermediate snapshots keep the far-field guard active along the run.
  c.snapshot_times = {0.02, 0.05, 0.1, 0.15, 0.2};
  const Trajectory tr = solve(gaussian(g), c);
  const double e0 = tr.energy.front().bf_energy;
  const double res = tr.energy.back().dissipation_residual / e0;
  return {tr.max_mass_drift <= 1e-10 && res <= 1e-4,
          fmt("mass drift %.2e, dissipation residual %.2e relative, %zu rejected steps",
              tr.max_mass_drift, res, tr.rejected_steps)};
}

// Shared sweep scenario for the homotopy criteria.
struct SweepScenario {
  GridSpec grid = make_grid(1, 16.0, 512);
  Field u0;
  Field u_ph;
  ConvergenceTable table;
  double seconds = 0.0;
  SweepOptions options;

  SweepScenario() {
    u0 = gaussian(grid);
    options.n_values = {0.1, 0.03, 0.01, 0.003};
    options.m = 2;
    options.t_eval = 0.1;
    options.dt = 1e-4;
    options.variant = PathVariant::simple;
    const auto t0 = std::chrono::steady_clock::now();
    table = sweep(u0, DegeneracyFunction::rational(), Schedule{}, options);
    seconds = seconds_since(t0);
    u_ph = phe_solve(u0, 2, 0.1);
  }
};

Outcome ac8(const SweepScenario& sc) {
  bool ok = sc.seconds < 600.0;
  std::string d;
  double last = INFINITY;
  for (const auto& r : sc.table.rows) {
    ok = ok && !r.failed && r.l2_gap < last;
    last = r.l2_gap;
    d += fmt("n=%g gap=%.3e; ", r.n, r.l2_gap);
  }
  return {ok, d + fmt("sweep %.1fs", sc.seconds)};
}

Outcome ac9(const SweepScenario& sc) {
  const auto f = DegeneracyFunction::rational();
  const CorrectionField corr = correction_phi(sc.u0, 2, f, 0.1, 4000, 1e-8 * max_abs(sc.u0));
  const int sign = select_phi_sign(corr, sc.u_ph, sc.table.rows);
  const Field phi = double(sign) * corr.values;
  const Field zero(sc.grid);
  const double phi_norm = l2_norm(phi);
  const CorrectionField fine = correction_phi(sc.u0, 2, f, 0.1, 8000, 1e-8 * max_abs(sc.u0));
  const double node_change = l2_norm(fine.values - corr.values) / l2_norm(fine.values);
  bool ok = corr.clamped_fraction <= 0.2 && node_change <= 1e-4;
  std::string d = fmt("clamped %.3f (space-time %.3f), sign %+d, |phi| %.4f, node doubling %.1e; ",
                      corr.clamped_fraction, corr.clamped_fraction_spacetime, sign, phi_norm, node_change);
  double last = INFINITY;
  for (const auto& r : sc.table.rows) {
    const double ratio = branching_residual(r.u, sc.u_ph, phi, r.n).remainder_ratio;
    const double ablated = branching_residual(r.u, sc.u_ph, zero, r.n).remainder_ratio;
    ok = ok && ratio < last && ablated >= 0.5 * phi_norm;
    last = ratio;
    d += fmt("n=%g ratio=%.3e ablated=%.3f; ", r.n, ratio, ablated);
  }
  const SlopeFit s = sc.table.slope;
  ok = ok && s.slope >= 0.7 && s.slope <= 1.3;
  return {ok, d + fmt("slope %.4f +- %.4f", s.slope, s.ci_half_width)};
}

Outcome ac10(const fs::path& runs) {
  const GridSpec g = make_grid(1, 60.0, 1024);
  const Field u0 = gaussian(g, 2.5, 0.5);
  SolverConfig c;
  c.m = 2;
  c.path = RegPath{DegeneracyFunction::rational(), 0.0, PathVariant::full};
  c.eps = 1.0;
  c.dt_init = 1e-4;
  c.t_final = 0.05;
  double most_negative = 0.0, t_neg = NAN;
  solve(u0, c, [&](double t, const Field& u) {
    for (double v : u.values)
      if (v < most_negative) {
        most_negative = v;
        t_neg = t;
      }
  });

  std::string times;
  for (int k = 1; k <= 50; ++k) times += (k > 1 ? "," : "") + fmt("%g", 0.1 * k);
  RunConfig rc = parse_config(std::string(R"({"command": "solve",
    "grid": {"half_width": 60, "points": 1024},
    "initial": {"center": [2.5], "width": 0.5},
    "solver": {"m": 2, "eps": 1, "dt": 1e-4, "t_final": 0.05},
    "degeneracy": {"n": 0},
    "interface": {"k_half_width": 1, "times": [)") + times + "]}}");
  rc.output = runs / "ac10_solve";
  const RunManifest m = run(rc);
  const auto manifest = nlohmann::json::parse(slurp(rc.output / "manifest.json"));
  const auto& T = manifest["summary"]["eventual_positivity_T_linear"];
  const bool has_T = m.ok && T.is_number();
  return {most_negative < 0.0 && has_T,
          fmt("min u = %.3e at t = %.4f; eventual positivity on K=[-1,1] from T = %s (manifest %s)",
              most_negative, t_neg, has_T ? fmt("%g", T.get<double>()).c_str() : "none",
              (rc.output / "manifest.json").c_str())};
}

Outcome ac11() {
  const ScheduleValue v = schedule_eval(Schedule{}, 1e-2);
  auto limit = [&](PathVariant variant, double dt, int points) {
    const GridSpec g = make_grid(1, 20.0, points);
    SolverConfig c;
    c.m = 2;
    c.path = RegPath{DegeneracyFunction::rational(), v.n, variant};
    c.eps = v.eps;
    c.dt_init = dt;
    c.t_final = 0.1;
    return solve(gaussian(g), c).final_state();
  };
  const Field full = limit(PathVariant::full, 1e-4, 512);
  const Field simple = limit(PathVariant::simple, 1e-4, 512);
  // Discretization floor: larger of the dt-halving and M-doubling changes.
  const double floor_t = l2_norm(simple - limit(PathVariant::simple, 5e-5, 512));
  const Field fine = limit(PathVariant::simple, 1e-4, 1024);
  Field coarse(simple.grid);
  for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = fine[2 * i];
  const double floor_x = l2_norm(simple - coarse);
  const double floor = std::max(floor_t, floor_x);
  const double gap = l2_norm(full - simple);
  const bool agree = gap <= 10.0 * floor;
  return {std::isfinite(gap) && std::isfinite(floor),
          fmt("n=1e-2 eps=%.3e: |u_full - u_simple| = %.4e, floor %.2e (dt %.2e, dx %.2e); %s", v.eps, gap,
              floor, floor_t, floor_x, agree ? "limits agree" : "gap reported, paths differ")};
}

Outcome ac12(const fs::path& runs) {
  const std::string text = R"({"command": "sweep",
    "grid": {"half_width": 16, "points": 512},
    "solver": {"m": 2, "dt": 1e-4, "t_final": 0.1, "path": "simple"},
    "schedule": {"kind": "eps_of_n", "c": 1, "n_values": [0.1, 0.03, 0.01, 0.003]},
    "branch": {"time_nodes": 4000}})";
  std::vector<fs::path> dirs = {runs / "ac12_a", runs / "ac12_b"};
  for (const auto& d : dirs) {
    fs::remove_all(d);
    RunConfig c = parse_config(text);
    c.output = d;
    const RunManifest m = run(c);
    if (!m.ok) return {false, "sweep failed: " + m.failure};
  }
  bool same = true;
  std::string d;
  for (const char* f : {"convergence.csv", "plot_data.csv"}) {
    const std::string a = slurp(dirs[0] / f), b = slurp(dirs[1] / f);
    same = same && !a.empty() && a == b;
    d += fmt("%s %s (sha256 %.16s); ", f, a == b ? "identical" : "DIFFER", sha256_hex(a).c_str());
  }
  return {same, d};
}

} // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const fs::path runs = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "polyheat_acceptance";
  fs::create_directories(runs);
  int failures = 0;
  auto emit = [&](int k, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("AC%d %s %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  };
  emit(1, ac1);
  emit(2, ac2);
  emit(3, ac3);
  emit(4, ac4);
  emit(5, ac5);
  emit(6, ac6);
  emit(7, ac7);
  const SweepScenario scenario;
  emit(8, [&] { return ac8(scenario); });
  emit(9, [&] { return ac9(scenario); });
  emit(10, [&] { return ac10(runs); });
  emit(11, ac11);
  emit(12, [&] { return ac12(runs); });
  return failures == 0 ? 0 : 1;
}
