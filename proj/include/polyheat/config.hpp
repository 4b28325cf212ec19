#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyheat/degeneracy.hpp"
#include "polyheat/grid.hpp"
#include "polyheat/homotopy.hpp"
#include "polyheat/solver.hpp"

namespace polyheat {

enum class Command { kernel, spectrum, solve, sweep, branch };

const char* to_string(Command c);
Command command_from_string(const std::string& name);

struct InitialSpec {
  std::string kind = "gaussian";  // gaussian | random_bumps
  double amplitude = 1.0;
  double width = 1.0;
  std::vector<double> center;     // defaults to the origin
  int bumps = 3;                  // random_bumps only
};

struct KernelBlock {
  int m = 2;
  int dim = 1;
  double r_max = 40.0;
  double dr = 0.05;
  int nodes = 256;
};

struct SpectrumBlock {
  int m = 2;
  int max_order = 4;
  int adjoint_max_order = 8;
};

struct BranchBlock {
  double t = 0.1;
  int time_nodes = 1000;
  std::optional<double> clamp_floor;  // default 1e-8 sup|u0|
  double max_clamped_fraction = 0.2;
};

struct InterfaceBlock {
  double k_half_width = 1.0;
  std::vector<double> times;
};

struct RunConfig {
  Command command = Command::solve;
  GridSpec grid = make_grid(1, 16.0, 256);
  InitialSpec initial;
  // solver block
  int m = 2;
  double eps = 1e-3;
  double dt = 1e-4;
  double t_final = 0.1;
  std::optional<double> stabilization;
  bool dealias = true;
  double energy_tol = 1e-8;
  std::vector<double> snapshot_times;
  Scheme scheme = Scheme::etdrk4;
  PathVariant variant = PathVariant::full;
  // degeneracy block
  DegeneracyFunction f = DegeneracyFunction::rational();
  double n = 0.0;
  nlohmann::json degeneracy_echo;
  // schedule block
  Schedule schedule;
  std::vector<double> n_values;
  KernelBlock kernel;
  SpectrumBlock spectrum;
  BranchBlock branch;
  InterfaceBlock interface;
  std::filesystem::path output = "polyheat_out";
  std::uint64_t seed = 0;
  int workers = 1;
  nlohmann::json echo;  // normalized copy of the input

  SolverConfig solver_config() const;
  RegPath path() const { return RegPath{f, n, variant}; }
};

/// Strict JSON parse: unknown keys and invariant violations are reported with
/// their field path.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const nlohmann::json& j);

Field make_initial(const RunConfig& config);

std::string config_help();

} // namespace polyheat
