#include <doctest.h>

#include "polyheat/config.hpp"
#include "polyheat/error.hpp"

using namespace polyheat;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("empty config takes defaults") {
  const RunConfig c = parse_config(std::string("{}"));
  CHECK(c.grid.points == 256);
  CHECK(c.eps == 1e-3);
  CHECK(c.scheme == Scheme::etdrk4);
  CHECK(c.variant == PathVariant::full);
  CHECK(c.workers == 1);
}

TEST_CASE("full config round trip") {
  const RunConfig c = parse_config(std::string(R"({
    "command": "sweep",
    "grid": {"dim": 1, "half_width": 12, "points": 128},
    "solver": {"m": 2, "eps": 0.5, "dt": 1e-3, "t_final": 0.2, "scheme": "imex1", "path": "simple"},
    "degeneracy": {"kind": "tanh", "scale": 2.0, "n": 0.1},
    "schedule": {"kind": "n_of_eps", "c": 0.5, "n_values": [1e-2, 1e-4]},
    "seed": 7, "workers": 3
  })"));
  CHECK(c.command == Command::sweep);
  CHECK(c.grid.half_width == 12.0);
  CHECK(c.scheme == Scheme::imex1);
  CHECK(c.variant == PathVariant::simple);
  CHECK(c.f.kind() == DegeneracyKind::tanh);
  CHECK(c.schedule.kind == ScheduleKind::n_of_eps);
  CHECK(c.n_values.size() == 2u);
  CHECK(c.seed == 7u);
  CHECK(c.workers == 3);
  const SolverConfig s = c.solver_config();
  CHECK(s.eps == 0.5);
  CHECK(s.t_final == 0.2);
  CHECK(c.echo["grid"]["points"] == 128);
}

TEST_CASE("eps out of range names the field") {
  const std::string msg = message_of(R"({"solver": {"eps": 0}})");
  CHECK(msg.find("solver.eps") != std::string::npos);
  CHECK(msg.find("eps must lie in (0, 1]") != std::string::npos);
  CHECK_FALSE(message_of(R"({"solver": {"eps": 1.5}})").empty());
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK(message_of(R"({"solver": {"epsilonn": 0.1}})").find("unknown key 'solver.epsilonn'") !=
        std::string::npos);
  CHECK(message_of(R"({"gird": {}})").find("gird") != std::string::npos);
}

TEST_CASE("type and value errors") {
  CHECK_FALSE(message_of(R"({"grid": {"points": "many"}})").empty());
  CHECK_FALSE(message_of(R"({"solver": {"scheme": "rk45"}})").empty());
  CHECK_FALSE(message_of(R"({"degeneracy": {"kind": "spline", "knots_t": [0, 1], "knots_f": [0, -1]}})").empty());
  CHECK_FALSE(message_of("{not json").empty());
}

TEST_CASE("initial data") {
  RunConfig c = parse_config(std::string(R"({"grid": {"half_width": 10, "points": 64},
                                             "initial": {"amplitude": 2, "width": 0.5, "center": [1.25]}})"));
  const Field u = make_initial(c);
  CHECK(max_abs(u) == doctest::Approx(2.0));
  std::size_t peak = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] > u[peak]) peak = i;
  CHECK(point_of(u.grid, peak)[0] == doctest::Approx(1.25));
  c = parse_config(std::string(R"({"grid": {"half_width": 10, "points": 64},
                                   "initial": {"kind": "random_bumps", "bumps": 4}, "seed": 3})"));
  const Field a = make_initial(c), b = make_initial(c);
  CHECK(a.values == b.values);
  c.seed = 4;
  CHECK(make_initial(c).values != a.values);
}

TEST_CASE("help text lists the blocks") {
  const std::string h = config_help();
  for (const char* block : {"grid", "solver", "degeneracy", "schedule", "kernel", "branch"})
    CHECK(h.find(block) != std::string::npos);
}

}
