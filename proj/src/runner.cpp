#include "polyheat/runner.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polyheat/error.hpp"
#include "polyheat/kernel.hpp"
#include "polyheat/phf1.hpp"
#include "polyheat/spectral_theory.hpp"

namespace polyheat {

using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorKind::io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

json to_json(const RunManifest& m) {
  json arts = json::array();
  for (const auto& a : m.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  return {{"run_id", m.run_id},
          {"command", m.command},
          {"config", m.config},
          {"artifacts", arts},
          {"seconds", m.seconds},
          {"outcome", m.ok ? json("ok") : json({{"failed", m.failure}})},
          {"summary", m.summary},
          {"version", m.version}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.run_id = j.at("run_id").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.config = j.value("config", json::object());
    for (const auto& a : j.at("artifacts"))
      m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>(),
                             a.at("bytes").get<std::uint64_t>()});
    m.seconds = j.value("seconds", 0.0);
    const json& outcome = j.at("outcome");
    if (outcome.is_string()) {
      m.ok = outcome.get<std::string>() == "ok";
    } else {
      m.ok = false;
      m.failure = outcome.at("failed").get<std::string>();
    }
    m.summary = j.value("summary", json::object());
    m.version = j.value("version", std::string());
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("corrupt manifest: ") + e.what());
  }
  return m;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// All files of one run go through this writer, in order, from one thread.
class RunWriter {
public:
  explicit RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::io, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void add(const std::string& name, const std::string& bytes) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out.write(bytes.data(), std::streamsize(bytes.size()));
    out.close();
    if (!out) fail(ErrorKind::io, "write failed for " + path.string());
    artifacts_.push_back({name, sha256_hex(bytes), bytes.size()});
  }

  void add_field(const std::string& name, const Field& u) {
    std::ostringstream os(std::ios::binary);
    write_phf1(os, u);
    add(name, os.str());
  }

  const std::vector<ArtifactEntry>& artifacts() const { return artifacts_; }
  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
  std::vector<ArtifactEntry> artifacts_;
};

json fit_json(const DecayFit& f) { return {{"C", f.C}, {"a", f.a}, {"alpha", f.alpha}, {"points", f.points}}; }

// First sampled time after which every later sample is positive on K.
json eventual_time(const std::vector<std::pair<double, bool>>& samples) {
  if (samples.empty() || !samples.back().second) return nullptr;
  std::size_t i = samples.size();
  while (i > 0 && samples[i - 1].second) --i;
  return samples[i].first;
}

void run_kernel(const RunConfig& c, RunWriter& w, json& summary) {
  QuadratureSpec q = default_quadrature(c.kernel.m);
  q.nodes = c.kernel.nodes;
  const auto radii = uniform_radii(c.kernel.r_max, c.kernel.dr);
  KernelProfile p = profile_bessel(c.kernel.m, c.kernel.dim, radii, q);
  p.fit = decay_fit(p);
  w.add("profile.csv", to_csv(p));
  summary["F0"] = p.values.front();
  summary["sign_changes"] = sign_changes(p.values, 1e-12);
  summary["decay_fit"] = fit_json(*p.fit);
  summary["alpha_expected"] = 2.0 * c.kernel.m / (2.0 * c.kernel.m - 1.0);
}

void run_spectrum(const RunConfig& c, RunWriter& w, json& summary) {
  const int m = c.spectrum.m;
  std::ostringstream res;
  res << "beta,order,lambda,residual\n";
  double worst = 0.0;
  for (const auto& beta : multi_indices_up_to(c.grid.dim, c.spectrum.max_order)) {
    const double r = eigen_residual(beta, m, c.grid);
    worst = std::max(worst, r);
    std::string label;
    for (int e : beta.entries()) label += (label.empty() ? "" : ";") + std::to_string(e);
    res << label << ',' << beta.order() << ',' << num(eigenvalue(beta, m)) << ',' << num(r) << '\n';
  }
  w.add("eigen_residuals.csv", res.str());

  const Biorthogonality b = biorthogonality_matrix(c.spectrum.max_order, m, c.grid);
  std::ostringstream gram;
  const std::size_t n = b.indices.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) gram << (j ? "," : "") << num(b.at(i, j));
    gram << '\n';
  }
  w.add("gram.csv", gram.str());

  json polys = json::array();
  bool exact = true;
  for (const auto& beta : multi_indices_up_to(c.grid.dim, c.spectrum.adjoint_max_order)) {
    const Polynomial p = adjoint_eigenpolynomial(beta, m);
    const bool ok = apply_L_star(p, m) == eigenvalue_exact(beta, m) * p;
    exact = exact && ok;
    polys.push_back({{"beta", beta.entries()}, {"lambda", eigenvalue_exact(beta, m).str()},
                     {"eigen_relation_exact", ok}, {"terms", to_json(p)}});
  }
  w.add("adjoint_polynomials.json", polys.dump(2) + "\n");
  summary["max_eigen_residual"] = worst;
  summary["gram_00"] = b.at(0, 0);
  summary["max_off_diagonal"] = b.max_off_diagonal;
  summary["max_diagonal_error"] = b.max_diagonal_error;
  summary["adjoint_relations_exact"] = exact;
}

void run_solve(const RunConfig& c, RunWriter& w, json& summary) {
  const Field u0 = make_initial(c);
  const Trajectory traj = solve(u0, c.solver_config());
  const double threshold = 1e-8 * max_abs(u0);
  std::ostringstream iface;
  iface << "t,support_measure,sign_change_count,positivity_on_K,min_on_K\n";
  std::vector<std::pair<double, bool>> samples;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Field& u = traj.snapshots[k];
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.phf1", k);
    w.add_field(name, u);
    const InterfaceReport r = interface_report(u, threshold, c.interface.k_half_width);
    iface << num(u.time) << ',' << num(r.support_measure) << ',' << r.sign_change_count << ','
          << (r.positivity_on_K ? 1 : 0) << ',' << num(r.min_on_K) << '\n';
    samples.emplace_back(u.time, r.positivity_on_K);
  }
  w.add("energy.csv", energy_csv(traj.energy));
  w.add("interface.csv", iface.str());
  if (!c.interface.times.empty()) {
    // Eventual positivity of the linear flow from the same data.
    std::ostringstream pos;
    pos << "t,min_on_K,positivity_on_K,min_global\n";
    std::vector<std::pair<double, bool>> lin;
    double most_negative = 0.0;
    for (double t : c.interface.times) {
      const Field u = phe_solve(u0, c.m, t);
      const InterfaceReport r = interface_report(u, threshold, c.interface.k_half_width);
      double mn = 0.0;
      for (double v : u.values) mn = std::min(mn, v);
      most_negative = std::min(most_negative, mn);
      pos << num(t) << ',' << num(r.min_on_K) << ',' << (r.positivity_on_K ? 1 : 0) << ',' << num(mn) << '\n';
      lin.emplace_back(t, r.positivity_on_K);
    }
    w.add("positivity.csv", pos.str());
    summary["eventual_positivity_T_linear"] = eventual_time(lin);
    summary["linear_most_negative"] = most_negative;
  }
  const EnergyReport& last = traj.energy.back();
  summary["t_reached"] = last.t;
  summary["accepted_steps"] = traj.accepted_steps;
  summary["rejected_steps"] = traj.rejected_steps;
  summary["max_mass_drift"] = traj.max_mass_drift;
  summary["max_energy_increase"] = traj.max_energy_increase;
  summary["dissipation_residual_relative"] =
      traj.energy.front().bf_energy > 0 ? last.dissipation_residual / traj.energy.front().bf_energy : 0.0;
  summary["sup_abs"] = traj.sup_abs;
  summary["eventual_positivity_T"] = eventual_time(samples);
}

double clamp_floor_of(const RunConfig& c, const Field& u0) {
  return c.branch.clamp_floor.value_or(1e-8 * max_abs(u0));
}

SweepOptions sweep_options(const RunConfig& c, double t_eval) {
  SweepOptions o;
  o.n_values = c.n_values;
  o.m = c.m;
  o.t_eval = t_eval;
  o.dt = c.dt;
  o.scheme = c.scheme;
  o.variant = c.variant;
  o.workers = c.workers;
  o.dealias = c.dealias;
  o.stabilization = c.stabilization;
  return o;
}

void run_sweep(const RunConfig& c, RunWriter& w, json& summary) {
  const Field u0 = make_initial(c);
  check_schedule_trend(c.schedule, [&] {
    std::vector<double> p;
    for (double v : c.n_values)
      if (v > 0) p.push_back(v);
    return p;
  }());
  ConvergenceTable table = sweep(u0, c.f, c.schedule, sweep_options(c, c.t_final));
  int sign = 0;
  double clamped = NAN;
  std::string correction_note;
  try {
    const CorrectionField corr = correction_phi(u0, c.m, c.f, c.t_final, c.branch.time_nodes,
                                                clamp_floor_of(c, u0), c.branch.max_clamped_fraction);
    clamped = corr.clamped_fraction;
    const Field u_ph = phe_solve(u0, c.m, c.t_final);
    sign = select_phi_sign(corr, u_ph, table.rows);
    const Field phi = double(sign) * corr.values;
    for (auto& r : table.rows)
      if (!r.failed) r.correction_gap = branching_residual(r.u, u_ph, phi, r.n).linear_gap;
  } catch (const Error& e) {
    correction_note = e.what();
  }
  w.add("convergence.csv", convergence_csv(table));
  w.add("plot_data.csv", plot_data_csv(table));
  json s = sweep_summary(table, sign, clamped);
  if (!correction_note.empty()) s["correction_error"] = correction_note;
  w.add("summary.json", s.dump(2) + "\n");
  summary = s;
}

void run_branch(const RunConfig& c, RunWriter& w, json& summary) {
  const Field u0 = make_initial(c);
  const CorrectionField corr = correction_phi(u0, c.m, c.f, c.branch.t, c.branch.time_nodes,
                                              clamp_floor_of(c, u0), c.branch.max_clamped_fraction);
  w.add_field("correction.phf1", corr.values);
  summary["clamped_fraction"] = corr.clamped_fraction;
  summary["clamped_fraction_spacetime"] = corr.clamped_fraction_spacetime;
  summary["phi_l2"] = l2_norm(corr.values);
  if (c.n_values.empty()) return;
  const Field u_ph = phe_solve(u0, c.m, c.branch.t);
  ConvergenceTable table = sweep(u0, c.f, c.schedule, sweep_options(c, c.branch.t));
  const int sign = select_phi_sign(corr, u_ph, table.rows);
  const Field phi = double(sign) * corr.values;
  const Field zero(c.grid);
  std::ostringstream out;
  out << "n,eps,linear_gap,remainder_ratio,ablated_ratio,failed\n";
  for (const auto& r : table.rows) {
    if (r.n <= 0.0) continue;
    if (r.failed) {
      out << num(r.n) << ',' << num(r.eps) << ",nan,nan,nan,1\n";
      continue;
    }
    const BranchingResidual b = branching_residual(r.u, u_ph, phi, r.n);
    const BranchingResidual a = branching_residual(r.u, u_ph, zero, r.n);
    out << num(r.n) << ',' << num(r.eps) << ',' << num(b.linear_gap) << ',' << num(b.remainder_ratio)
        << ',' << num(a.remainder_ratio) << ",0\n";
  }
  w.add("branching.csv", out.str());
  summary["sign_of_phi"] = sign;
}

} // namespace

RunManifest run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.command = to_string(config.command);
  m.config = config.echo.is_null() ? json::object() : config.echo;
  m.config["command"] = m.command;
  m.config["seed"] = config.seed;
  m.config["workers"] = config.workers;
  m.config.erase("output");
  m.run_id = sha256_hex(m.config.dump()).substr(0, 16);
  std::unique_ptr<RunWriter> writer;
  try {
    writer = std::make_unique<RunWriter>(config.output);
    switch (config.command) {
      case Command::kernel: run_kernel(config, *writer, m.summary); break;
      case Command::spectrum: run_spectrum(config, *writer, m.summary); break;
      case Command::solve: run_solve(config, *writer, m.summary); break;
      case Command::sweep: run_sweep(config, *writer, m.summary); break;
      case Command::branch: run_branch(config, *writer, m.summary); break;
    }
  } catch (const Error& e) {
    m.ok = false;
    m.failure = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    m.ok = false;
    m.failure = e.what();
  }
  if (writer) m.artifacts = writer->artifacts();
  m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (writer) {
    std::ofstream out(config.output / "manifest.json", std::ios::trunc);
    out << to_json(m).dump(2) << '\n';
    if (!out) {
      m.ok = false;
      m.failure = "cannot write manifest.json";
    }
  }
  return m;
}

std::string report(const std::vector<std::filesystem::path>& manifests) {
  if (manifests.empty()) return "no runs\n";
  std::ostringstream out, body;
  std::size_t ok = 0, readable = 0;
  std::vector<std::string> unreadable;
  for (const auto& path : manifests) {
    RunManifest m;
    try {
      std::ifstream in(path);
      if (!in) fail(ErrorKind::io, "cannot open");
      m = manifest_from_json(json::parse(in));
    } catch (const std::exception& e) {
      unreadable.push_back(path.string() + " (" + e.what() + ")");
      continue;
    }
    ++readable;
    ok += m.ok ? 1 : 0;
    body << m.run_id << "  " << m.command << "  " << (m.ok ? "ok" : "failed: " + m.failure) << '\n';
    const json& s = m.summary;
    auto show = [&](const char* key, const char* label) {
      if (s.contains(key) && !s.at(key).is_null()) body << "    " << label << ": " << s.at(key).dump() << '\n';
    };
    show("slope", "fitted slope");
    show("slope_ci", "slope 95% CI");
    show("sign_of_phi", "sign_of_phi");
    show("clamped_fraction", "clamped fraction");
    show("decay_fit", "decay fit");
    show("max_eigen_residual", "max eigen residual");
    show("max_mass_drift", "mass drift");
    show("dissipation_residual_relative", "dissipation residual");
    show("eventual_positivity_T", "eventual positivity T");
    show("eventual_positivity_T_linear", "eventual positivity T (linear)");
    if (s.contains("slope") && s.at("slope").is_number()) {
      const double slope = s.at("slope").get<double>();
      body << "    slope in [0.7, 1.3]: " << (slope >= 0.7 && slope <= 1.3 ? "pass" : "fail") << '\n';
    }
  }
  out << ok << "/" << manifests.size() << " ok";
  if (!unreadable.empty()) out << ", " << unreadable.size() << " unreadable";
  out << '\n' << body.str();
  for (const auto& u : unreadable) out << "unreadable: " << u << '\n';
  (void)readable;
  return out.str();
}

} // namespace polyheat
