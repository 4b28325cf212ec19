#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "polyheat/config.hpp"
#include "polyheat/error.hpp"
#include "polyheat/runner.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out;
  int workers = 0;
  std::optional<std::uint64_t> seed;
};

int execute(polyheat::Command command, const Overrides& o) {
  std::ifstream in(o.config);
  if (!in) {
    std::cerr << "polyheat: cannot read config " << o.config << "\n";
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();
  polyheat::RunConfig cfg;
  try {
    cfg = polyheat::parse_config(text.str());
  } catch (const polyheat::Error& e) {
    std::cerr << "polyheat: invalid config: " << e.what() << "\n";
    return 2;
  }
  if (cfg.echo.contains("command") && cfg.command != command) {
    std::cerr << "polyheat: config command '" << polyheat::to_string(cfg.command)
              << "' does not match '" << polyheat::to_string(command) << "'\n";
    return 2;
  }
  cfg.command = command;
  // Precedence for the run directory: --out, then POLYHEAT_OUT, then the config.
  if (const char* env = std::getenv("POLYHEAT_OUT"); env && *env) cfg.output = env;
  if (!o.out.empty()) cfg.output = o.out;
  if (o.workers > 0) cfg.workers = o.workers;
  if (o.seed) cfg.seed = *o.seed;
  const polyheat::RunManifest m = polyheat::run(cfg);
  std::cout << m.run_id << " " << m.command << " "
            << (m.ok ? "ok" : "failed: " + m.failure) << " -> " << cfg.output.string() << "\n";
  return m.exit_code();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyharmonic heat kernels, degenerate high-order diffusion and homotopy sweeps"};
  app.require_subcommand(1);
  app.footer(polyheat::config_help());
  app.set_version_flag("--version", polyheat::tool_version);

  Overrides o;
  const std::pair<const char*, const char*> commands[] = {
      {"kernel", "tabulate the rescaled profile F and fit its decay"},
      {"spectrum", "eigen-residuals, Gram matrix and adjoint polynomials"},
      {"solve", "one regularized degenerate solve with energy monitors"},
      {"sweep", "convergence sweep along a homotopy schedule"},
      {"branch", "correction field and branching residuals"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "run directory (overrides POLYHEAT_OUT and the config)");
    sub->add_option("--workers", o.workers, "worker threads for sweep rows")->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>("--seed", [&o](const std::uint64_t& s) { o.seed = s; },
                                            "seed for randomized initial data");
  }
  std::vector<std::string> manifests;
  CLI::App* rep = app.add_subcommand("report", "summarize manifest.json files");
  rep->add_option("manifests", manifests, "manifest files");

  CLI11_PARSE(app, argc, argv);

  if (rep->parsed()) {
    std::vector<std::filesystem::path> paths(manifests.begin(), manifests.end());
    std::cout << polyheat::report(paths);
    return 0;
  }
  for (const auto& [name, help] : commands)
    if (app.got_subcommand(name)) return execute(polyheat::command_from_string(name), o);
  return 2;
}
