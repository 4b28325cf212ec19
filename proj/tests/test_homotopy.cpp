#include <doctest.h>

#include <cmath>

#include "polyheat/homotopy.hpp"
#include "polyheat/kernel.hpp"

using namespace polyheat;

TEST_SUITE("homotopy") {

TEST_CASE("eps_of_n schedule") {
  Schedule s;
  const ScheduleValue v = schedule_eval(s, 0.01);
  CHECK(v.eps == doctest::Approx(std::exp(-10.0) / (1 - std::exp(-10.0))).epsilon(1e-10));
  CHECK(v.eps == doctest::Approx(4.54e-5).epsilon(1e-3));
  CHECK(v.product == doctest::Approx(0.1).epsilon(1e-10));
  CHECK_THROWS_AS(schedule_eval(s, 1e-6), Error);
  CHECK_THROWS_AS(schedule_eval(s, 0.0), Error);
  CHECK_NOTHROW(check_schedule_trend(s, {0.1, 0.03, 0.01}));
}

TEST_CASE("n_of_eps schedule") {
  Schedule s;
  s.kind = ScheduleKind::n_of_eps;
  const ScheduleValue v = schedule_eval(s, 1e-6);
  CHECK(v.n == doctest::Approx(0.269).epsilon(2e-3));
  CHECK(v.product == doctest::Approx(3.717).epsilon(1e-3));
  CHECK_THROWS_AS(schedule_eval(s, 1.5), Error);
  CHECK_NOTHROW(check_schedule_trend(s, {1e-2, 1e-4, 1e-6}));
  Schedule t;
  t.kind = ScheduleKind::n_of_eps;
  t.f = DegeneracyFunction::power(1.0, 10.0);
  CHECK_THROWS_AS(schedule_eval(t, 1.0), Error);
}

TEST_CASE("log slope fit") {
  const SlopeFit f = fit_log_slope({0.1, 0.01, 0.001}, {3e-2, 3e-4, 3e-6});
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.ci_half_width <= 1e-10);
  const SlopeFit n = fit_log_slope({0.1, 0.01, 0.001}, {1e-1, 2e-2, 1e-3});
  CHECK(n.ci_half_width > 0.1);
}

TEST_CASE("correction field") {
  const GridSpec g = make_grid(1, 16.0, 128);
  const Field u0 = sample(g, [](const Point& p) { return std::exp(-p[0] * p[0]); });
  const auto f = DegeneracyFunction::rational();
  const CorrectionField zero = correction_phi(u0, 2, f, 0.0, 10, 1e-8, 1.0);
  CHECK(max_abs(zero.values) == 0.0);
  const Field flat = sample(g, [](const Point&) { return 0.5; });
  CHECK(max_abs(correction_phi(flat, 2, f, 0.05, 50, 1e-8).values) <= 1e-14);
  const CorrectionField c = correction_phi(u0, 2, f, 0.05, 200, 1e-8, 1.0);
  CHECK(std::abs(integrate(c.values)) <= 1e-10);
  CHECK(max_abs(c.values) > 0.0);
  const CorrectionField c2 = correction_phi(u0, 2, f, 0.05, 400, 1e-8, 1.0);
  CHECK(l2_norm(c.values - c2.values) <= 1e-3 * l2_norm(c2.values));
  try {
    correction_phi(u0, 2, f, 0.05, 50, 1e-8, 0.01);
    FAIL("expected log-singularity failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::log_singularity);
  }
}

TEST_CASE("branching residual and sign selection") {
  const GridSpec g = make_grid(1, 8.0, 32);
  const Field uph = sample(g, [](const Point& p) { return std::exp(-p[0] * p[0]); });
  const Field phi = sample(g, [](const Point& p) { return p[0] * std::exp(-p[0] * p[0]); });
  const Field un = uph - 0.01 * phi;
  const BranchingResidual r0 = branching_residual(un, uph, phi, 0.0);
  CHECK(r0.remainder_ratio == 0.0);
  CHECK(r0.linear_gap == doctest::Approx(0.01 * l2_norm(phi)));
  CHECK(branching_residual(un, uph, -1.0 * phi, 0.01).linear_gap <= 1e-15);
  CorrectionField c;
  c.grid = g;
  c.values = phi;
  ConvergenceRow row;
  row.n = 0.01;
  row.u = un;
  CHECK(select_phi_sign(c, uph, {row}) == -1);
  row.u = uph + 0.01 * phi;
  CHECK(select_phi_sign(c, uph, {row}) == 1);
}

TEST_CASE("small sweep") {
  const GridSpec g = make_grid(1, 16.0, 512);
  const Field u0 = sample(g, [](const Point& p) { return std::exp(-p[0] * p[0]); });
  SweepOptions o;
  o.n_values = {0.0, 0.1, 0.03, 0.01};
  o.t_eval = 0.1;
  o.dt = 1e-4;
  o.workers = 2;
  const ConvergenceTable t = sweep(u0, DegeneracyFunction::rational(), Schedule{}, o);
  REQUIRE(t.rows.size() == 4u);
  CHECK(t.rows.front().n == 0.1);
  CHECK(t.rows.back().n == 0.0);
  CHECK(t.rows.back().l2_gap <= 1e-10);
  for (const auto& r : t.rows) {
    INFO(r.failure);
    CHECK_FALSE(r.failed);
  }
  CHECK(t.rows[0].l2_gap > t.rows[1].l2_gap);
  CHECK(t.rows[1].l2_gap > t.rows[2].l2_gap);
  CHECK(t.slope.points == 3);
  CHECK(t.rows.back().very_weak_residual <= 1e-8);
  const std::string csv = convergence_csv(t);
  CHECK(csv.rfind("n,eps,t_eval,l2_gap,sup_gap,correction_gap,very_weak_residual,failed,failure\n", 0) == 0);
  const std::string plot = plot_data_csv(t);
  CHECK(plot.rfind("log_n,log_l2_gap,log_correction_gap\n", 0) == 0);
  const auto j = sweep_summary(t, -1, 0.1);
  CHECK(j["rows"] == 4);
  CHECK(j["sign_of_phi"] == -1);
}

TEST_CASE("failed rows are recorded, not thrown") {
  const GridSpec g = make_grid(1, 16.0, 128);
  const Field u0 = sample(g, [](const Point& p) { return std::exp(-p[0] * p[0]); });
  SweepOptions o;
  o.n_values = {1e-6};
  o.t_eval = 0.01;
  const ConvergenceTable t = sweep(u0, DegeneracyFunction::rational(), Schedule{}, o);
  CHECK(t.rows[0].failed);
  CHECK(t.rows[0].failure.find("schedule out of range") != std::string::npos);
}

TEST_CASE("perturbation smallness report") {
  const GridSpec g = make_grid(1, 8.0, 64);
  const Field u = sample(g, [](const Point& p) { return std::exp(-p[0] * p[0]); });
  const auto f = DegeneracyFunction::rational();
  const ScheduleValue v = schedule_eval(Schedule{}, 0.01);
  const PerturbationReport r = perturbation_smallness_report({u}, f, v.n, v.eps, 0.1, 0.5, v.product);
  CHECK(r.product_matches_schedule);
  CHECK(r.theta_at_zero == doctest::Approx(1 - std::exp(-0.1)).epsilon(1e-9));
  CHECK(r.expansion_residual <= 0.01);
  CHECK(r.sup_theta_far <= r.far_bound + 1e-15);
}

}
