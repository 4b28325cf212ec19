#include "polyheat/config.hpp"

#include <cmath>
#include <random>
#include <set>

#include "polyheat/error.hpp"

namespace polyheat {

using nlohmann::json;

const char* to_string(Command c) {
  switch (c) {
    case Command::kernel: return "kernel";
    case Command::spectrum: return "spectrum";
    case Command::solve: return "solve";
    case Command::sweep: return "sweep";
    case Command::branch: return "branch";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  if (name == "kernel") return Command::kernel;
  if (name == "spectrum") return Command::spectrum;
  if (name == "solve") return Command::solve;
  if (name == "sweep") return Command::sweep;
  if (name == "branch") return Command::branch;
  fail(ErrorKind::config, "unknown command '" + name + "'");
}

namespace {

// Reads one JSON object, remembers which keys were consumed and rejects the
// rest so a misspelt knob never passes silently.
class Block {
public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::config, where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::config, field(key) + ": wrong type");
    }
  }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return std::nullopt;
    return get<T>(key, T{});
  }

  Block child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Block(j_.contains(key) ? j_.at(key) : empty, field(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) fail(ErrorKind::config, "unknown key '" + field(key) + "'");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) fail(ErrorKind::config, field + ": " + message);
}

// Re-raise module validation errors with the offending field path.
template <class Fn>
auto with_path(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    fail(ErrorKind::config, field + ": " + e.what());
  }
}

} // namespace

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.m = m;
  s.path = path();
  s.eps = eps;
  s.dt_init = dt;
  s.t_final = t_final;
  s.stabilization = stabilization;
  s.dealias = dealias;
  s.energy_tol = energy_tol;
  s.snapshot_times = snapshot_times;
  s.scheme = scheme;
  return s;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::config, std::string("config is not well-formed JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Block root(j, "");
  if (root.has("command"))
    c.command = with_path("command", [&] { return command_from_string(root.get<std::string>("command", "")); });
  else root.get<std::string>("command", "");

  {
    Block g = root.child("grid");
    const int dim = g.get<int>("dim", 1);
    const double L = g.get<double>("half_width", 16.0);
    const int M = g.get<int>("points", 256);
    g.finish();
    c.grid = with_path("grid", [&] { return make_grid(dim, L, M); });
  }
  {
    Block b = root.child("initial");
    c.initial.kind = b.get<std::string>("kind", "gaussian");
    c.initial.amplitude = b.get<double>("amplitude", 1.0);
    c.initial.width = b.get<double>("width", 1.0);
    c.initial.center = b.get<std::vector<double>>("center", {});
    c.initial.bumps = b.get<int>("bumps", 3);
    b.finish();
    check(c.initial.kind == "gaussian" || c.initial.kind == "random_bumps", b.field("kind"),
          "must be 'gaussian' or 'random_bumps'");
    check(c.initial.width > 0, b.field("width"), "must be positive");
    check(c.initial.center.empty() || int(c.initial.center.size()) == c.grid.dim, b.field("center"),
          "length must equal grid.dim");
    check(c.initial.bumps >= 1, b.field("bumps"), "must be >= 1");
  }
  {
    Block s = root.child("solver");
    c.m = s.get<int>("m", 2);
    c.eps = s.get<double>("eps", 1e-3);
    c.dt = s.get<double>("dt", 1e-4);
    c.t_final = s.get<double>("t_final", 0.1);
    c.stabilization = s.optional<double>("stabilization");
    c.dealias = s.get<bool>("dealias", true);
    c.energy_tol = s.get<double>("energy_tol", 1e-8);
    c.snapshot_times = s.get<std::vector<double>>("snapshot_times", {});
    c.scheme = with_path(s.field("scheme"), [&] { return scheme_from_string(s.get<std::string>("scheme", "etdrk4")); });
    c.variant = with_path(s.field("path"), [&] { return path_variant_from_string(s.get<std::string>("path", "full")); });
    s.finish();
    check(c.eps > 0 && c.eps <= 1.0, s.field("eps"), "eps must lie in (0, 1]");
    check(c.m >= 1 && c.m <= 3, s.field("m"), "must be 1, 2 or 3");
    check(c.dt > 0, s.field("dt"), "must be positive");
    check(c.t_final > 0, s.field("t_final"), "must be positive");
  }
  {
    Block d = root.child("degeneracy");
    const std::string kind = d.get<std::string>("kind", "rational");
    const double scale = d.get<double>("scale", 1.0);
    const double kappa = d.get<double>("kappa", 1.0);
    const double t_max = d.get<double>("t_max", 10.0);
    const auto kt = d.get<std::vector<double>>("knots_t", {});
    const auto kf = d.get<std::vector<double>>("knots_f", {});
    c.n = d.get<double>("n", 0.0);
    d.finish();
    check(c.n >= 0, d.field("n"), "must be >= 0");
    c.f = with_path(d.where(), [&] {
      switch (degeneracy_kind_from_string(kind)) {
        case DegeneracyKind::tanh: return DegeneracyFunction::tanh(scale);
        case DegeneracyKind::rational: return DegeneracyFunction::rational(scale);
        case DegeneracyKind::exp_saturating: return DegeneracyFunction::exp_saturating(scale);
        case DegeneracyKind::power: return DegeneracyFunction::power(kappa, t_max);
        case DegeneracyKind::spline: return DegeneracyFunction::spline(kt, kf);
      }
      return DegeneracyFunction::rational(scale);
    });
  }
  {
    Block s = root.child("schedule");
    const std::string kind = s.get<std::string>("kind", "eps_of_n");
    c.schedule.kind = with_path(s.field("kind"), [&] { return schedule_kind_from_string(kind); });
    c.schedule.c = s.get<double>("c", 1.0);
    c.schedule.f = c.f;
    c.n_values = s.get<std::vector<double>>("n_values", {});
    s.finish();
    check(c.schedule.c > 0, s.field("c"), "must be positive");
    for (double v : c.n_values) check(v >= 0, s.field("n_values"), "entries must be >= 0");
  }
  {
    Block k = root.child("kernel");
    c.kernel.m = k.get<int>("m", 2);
    c.kernel.dim = k.get<int>("dim", 1);
    c.kernel.r_max = k.get<double>("r_max", 40.0);
    c.kernel.dr = k.get<double>("dr", 0.05);
    c.kernel.nodes = k.get<int>("nodes", 256);
    k.finish();
    check(c.kernel.m >= 1, k.field("m"), "must be >= 1");
    check(c.kernel.dim >= 1 && c.kernel.dim <= 3, k.field("dim"), "must be 1, 2 or 3");
    check(c.kernel.r_max > 0 && c.kernel.dr > 0, k.where(), "r_max and dr must be positive");
    check(c.kernel.nodes > 0, k.field("nodes"), "must be positive");
  }
  {
    Block s = root.child("spectrum");
    c.spectrum.m = s.get<int>("m", 2);
    c.spectrum.max_order = s.get<int>("max_order", 4);
    c.spectrum.adjoint_max_order = s.get<int>("adjoint_max_order", 8);
    s.finish();
    check(c.spectrum.m >= 1, s.field("m"), "must be >= 1");
    check(c.spectrum.max_order >= 0 && c.spectrum.max_order <= 4, s.field("max_order"), "must be in [0, 4]");
    check(c.spectrum.adjoint_max_order >= 0 && c.spectrum.adjoint_max_order <= 12,
          s.field("adjoint_max_order"), "must be in [0, 12]");
  }
  {
    Block b = root.child("branch");
    c.branch.t = b.get<double>("t", 0.1);
    c.branch.time_nodes = b.get<int>("time_nodes", 1000);
    c.branch.clamp_floor = b.optional<double>("clamp_floor");
    c.branch.max_clamped_fraction = b.get<double>("max_clamped_fraction", 0.2);
    b.finish();
    check(c.branch.t >= 0, b.field("t"), "must be >= 0");
    check(c.branch.time_nodes >= 2, b.field("time_nodes"), "must be >= 2");
    check(!c.branch.clamp_floor || *c.branch.clamp_floor > 0, b.field("clamp_floor"), "must be positive");
  }
  {
    Block b = root.child("interface");
    c.interface.k_half_width = b.get<double>("k_half_width", 1.0);
    c.interface.times = b.get<std::vector<double>>("times", {});
    b.finish();
    check(c.interface.k_half_width > 0, b.field("k_half_width"), "must be positive");
  }
  c.output = root.get<std::string>("output", "polyheat_out");
  c.seed = root.get<std::uint64_t>("seed", 0);
  c.workers = root.get<int>("workers", 1);
  root.finish();
  check(c.workers >= 1, "workers", "must be >= 1");

  // Cross-block invariants per command.
  if (c.command == Command::solve || c.command == Command::sweep)
    with_path("solver", [&] {
      c.solver_config().validate();
      return 0;
    });
  if (c.command == Command::sweep)
    check(!c.n_values.empty(), "schedule.n_values", "sweep needs at least one value");
  if (c.command == Command::spectrum)
    check(c.grid.dim <= 2, "grid.dim", "spectrum checks support N = 1 or 2");

  c.echo = j;
  return c;
}

Field make_initial(const RunConfig& c) {
  const GridSpec& g = c.grid;
  const InitialSpec& in = c.initial;
  Point center{0.0, 0.0};
  for (std::size_t d = 0; d < in.center.size(); ++d) center[d] = in.center[d];
  auto gaussian = [&](const Point& p, const Point& c0, double amp) {
    double r2 = 0.0;
    for (int d = 0; d < g.dim; ++d) {
      const double dx = p[std::size_t(d)] - c0[std::size_t(d)];
      r2 += dx * dx;
    }
    return amp * std::exp(-r2 / (in.width * in.width));
  };
  if (in.kind == "gaussian")
    return sample(g, [&](const Point& p) { return gaussian(p, center, in.amplitude); });
  // random_bumps: reproducible from the seed alone.
  std::mt19937_64 rng(c.seed);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  std::vector<std::pair<Point, double>> bumps;
  for (int b = 0; b < in.bumps; ++b) {
    Point p{0.0, 0.0};
    for (int d = 0; d < g.dim; ++d)
      p[std::size_t(d)] = center[std::size_t(d)] + (uniform() - 0.5) * 0.5 * g.half_width;
    bumps.emplace_back(p, in.amplitude * (0.5 + 0.5 * uniform()));
  }
  return sample(g, [&](const Point& p) {
    double v = 0.0;
    for (const auto& [c0, amp] : bumps) v += gaussian(p, c0, amp);
    return v;
  });
}

std::string config_help() {
  return R"(Config file (JSON). Unknown keys are rejected. Defaults in brackets.
  command            kernel | spectrum | solve | sweep | branch (optional; the CLI command wins)
  grid               dim [1], half_width L [16], points M [256]; box is [-L, L)^N
  initial            kind gaussian|random_bumps [gaussian], amplitude [1], width [1],
                     center [origin], bumps [3] (random_bumps, driven by seed)
  solver             m [2], eps [1e-3], dt [1e-4], t_final [0.1], stabilization [1.1 (f^n(eps) + C_f^n)],
                     dealias [true], energy_tol [1e-8], snapshot_times [], scheme etdrk4|imex1 [etdrk4],
                     path full|simple [full]
  degeneracy         kind tanh|rational|exp_saturating|power|spline [rational], scale [1],
                     kappa [1], t_max [10], knots_t [], knots_f [], n [0]
  schedule           kind eps_of_n|n_of_eps [eps_of_n], c [1], n_values [] (schedule parameters;
                     0 adds the linear reference row)
  kernel             m [2], dim [1], r_max [40], dr [0.05], nodes [256]
  spectrum           m [2], max_order [4], adjoint_max_order [8]
  branch             t [0.1], time_nodes [1000], clamp_floor [1e-8 sup|u0|], max_clamped_fraction [0.2]
  interface          k_half_width [1], times [] (sample times for eventual positivity)
  output             run directory [polyheat_out]
  seed               [0]
  workers            sweep worker threads [1]
)";
}

} // namespace polyheat
