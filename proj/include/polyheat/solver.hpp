#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polyheat/degeneracy.hpp"
#include "polyheat/grid.hpp"
#include "polyheat/spectral.hpp"

namespace polyheat {

enum class Scheme {
  imex1,   // first-order stabilized exponential IMEX
  etdrk4,  // fourth-order exponential Runge–Kutta on the same split
};

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
  int m = 2;
  RegPath path;
  double eps = 1e-3;
  double dt_init = 1e-4;
  double t_final = 0.1;
  /// Stabilization c; default 1.1 * (f^n(eps) + C_f^n).
  std::optional<double> stabilization;
  bool dealias = true;
  /// Accept a step only if the BF energy grows by at most energy_tol * E(0).
  double energy_tol = 1e-8;
  std::vector<double> snapshot_times;
  Scheme scheme = Scheme::etdrk4;
  int max_halvings = 30;
  double boundedness_factor = 10.0;
  double decay_tol = 1e-8;
  bool check_decay = true;

  double stabilization_value() const;
  void validate() const;
};

struct EnergyReport {
  double t = 0.0;
  double mass = 0.0;
  /// ||(-Delta)^{(m-1)/2} u||^2 (item (1) for odd m, item (2) for even m).
  double bf_energy = 0.0;
  /// ||(-Delta)^{(m-2)/2} u||^2 (item (3)).
  double bf_lower = 0.0;
  /// int_0^t int |phi grad Delta^{m-1} u|^2.
  double flux_l2_accum = 0.0;
  /// int_0^t int phi |grad Delta^{m-1} u|^2.
  double dissipation_accum = 0.0;
  /// int_0^t int |grad Delta^{m-1} u|^2, for the f^n(eps)-weighted bound.
  double gradient_accum = 0.0;
  /// |bf_energy(t) + 2 dissipation_accum(t) - bf_energy(0)|.
  double dissipation_residual = 0.0;
};

struct Trajectory {
  std::string run_id;
  std::vector<Field> snapshots;
  std::vector<EnergyReport> energy;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double max_mass_drift = 0.0;  // relative
  double max_energy_increase = 0.0;
  double sup_abs = 0.0;

  const Field& final_state() const { return snapshots.back(); }
};

/// Partial report from the current state only.
struct BfEnergies {
  double bf_energy = 0.0;
  double bf_lower = 0.0;
  double mass = 0.0;
};

BfEnergies bf_energies(const Field& u, int m);

/// (-1)^{m-1} div(phi_eps(u) grad Delta^{m-1} u).
Field rhs(const Field& u, const SolverConfig& config);

struct StepResult {
  Field u;
  double dt_used = 0.0;
  int halvings = 0;
};

/// One stabilized IMEX step u_hat <- e^{-c|xi|^{2m} dt} (u_hat + dt R_hat(u)),
/// halving dt while the BF energy grows by more than the tolerance.
StepResult step_imex(const Field& u, double dt, const SolverConfig& config);
/// Same controller with the ETDRK4 update.
StepResult step_etdrk4(const Field& u, double dt, const SolverConfig& config);

/// Running flux integral: running + dt * int |phi grad Delta^{m-1} u|^2.
double flux_accumulate(const Field& u, const SolverConfig& config, double dt, double running);

/// Observer called after every accepted step with the new state.
using StepObserver = std::function<void(double t, const Field& u)>;

Trajectory solve(const Field& u0, const SolverConfig& config, const StepObserver& observer = {});

struct InterfaceReport {
  double support_measure = 0.0;
  int sign_change_count = 0;
  bool positivity_on_K = false;
  double min_on_K = 0.0;
};

/// K is the cube |x_i| <= k_half_width.
InterfaceReport interface_report(const Field& u, double threshold, double k_half_width = 1.0);

std::string energy_csv(const std::vector<EnergyReport>& series);

} // namespace polyheat
