#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyheat/degeneracy.hpp"
#include "polyheat/grid.hpp"
#include "polyheat/solver.hpp"

namespace polyheat {

enum class ScheduleKind { n_of_eps, eps_of_n };

const char* to_string(ScheduleKind k);
ScheduleKind schedule_kind_from_string(const std::string& name);

/// n_of_eps: n(eps) = c / sqrt|ln f(eps)|, so n |ln f(eps)| = c sqrt|ln f(eps)| -> inf.
/// eps_of_n: eps(n) = f^{-1}(e^{-c / sqrt n}), so n |ln f(eps(n))| = c sqrt n -> 0.
struct Schedule {
  ScheduleKind kind = ScheduleKind::eps_of_n;
  double c = 1.0;
  DegeneracyFunction f = DegeneracyFunction::rational();
};

struct ScheduleValue {
  double n = 0.0;
  double eps = 1.0;
  /// n |ln f(eps)|.
  double product = 0.0;
};

ScheduleValue schedule_eval(const Schedule& schedule, double parameter);

/// Checks the asymptotic product trend over decreasing parameters: decreasing
/// to zero for eps_of_n, increasing for n_of_eps. Throws on violation.
void check_schedule_trend(const Schedule& schedule, const std::vector<double>& parameters);

struct ConvergenceRow {
  double n = 0.0;
  double eps = 0.0;
  double t_eval = 0.0;
  double l2_gap = 0.0;
  double sup_gap = 0.0;
  /// ||u_n - u_PH - n phi||, NaN when no correction was supplied.
  double correction_gap = 0.0;
  double very_weak_residual = 0.0;
  bool failed = false;
  std::string failure;
  Field u;  // final state; not written to CSV
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_half_width = 0.0;  // 95%
  int points = 0;
};

SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;  // n descending
  SlopeFit slope;
  std::string schedule;
};

struct SweepOptions {
  std::vector<double> n_values;
  int m = 2;
  double t_eval = 0.1;
  double dt = 1e-4;
  Scheme scheme = Scheme::etdrk4;
  PathVariant variant = PathVariant::simple;
  int workers = 1;
  bool dealias = true;
  std::optional<double> stabilization;
};

struct CorrectionField {
  GridSpec grid;
  double t = 0.0;
  /// The Duhamel integral of the source ln f(|u_PH|) grad Delta^{m-1} u_PH,
  /// with the leading sign as written; the selected sign is applied by callers.
  Field values;
  double clamp_floor = 0.0;
  /// measure{|u_PH(t)| < eta} / box volume at the evaluation time.
  double clamped_fraction = 0.0;
  /// Same measure averaged over the time nodes in (0, t].
  double clamped_fraction_spacetime = 0.0;
  int time_nodes = 0;
};

/// Throws log_singularity when clamped_fraction > max_clamped_fraction.
CorrectionField correction_phi(const Field& u0, int m, const DegeneracyFunction& f, double t,
                               int time_nodes, double clamp_floor,
                               double max_clamped_fraction = 0.2);

/// +1 or -1: sign s minimizing sum ||(u_n - u_PH)/n - s I||^2 over the rows.
int select_phi_sign(const CorrectionField& correction, const Field& u_ph,
                    const std::vector<ConvergenceRow>& rows);

struct BranchingResidual {
  double linear_gap = 0.0;
  double remainder_ratio = 0.0;
};

BranchingResidual branching_residual(const Field& u_n, const Field& u_ph, const Field& phi,
                                     double n);

/// Sweep one solver run per n; the n = 0 row uses psi = 1. Rows run
/// concurrently on `workers` threads and the table is sorted by n descending.
ConvergenceTable sweep(const Field& u0, const DegeneracyFunction& f, const Schedule& schedule,
                       const SweepOptions& options,
                       const CorrectionField* correction = nullptr, int phi_sign = 1);

struct PerturbationReport {
  double n = 0.0;
  double eps = 0.0;
  double product = 0.0;            // n |ln f(eps)|
  double sup_theta_near = 0.0;     // over D = {eps^2 <= eps^2 + u^2 <= t^2}
  double sup_theta_far = 0.0;      // over the complement
  double theta_at_zero = 0.0;      // 1 - f^n(eps)
  double far_bound = 0.0;          // 1 - f^n(threshold)
  double expansion_residual = 0.0; // |theta_at_zero - n|ln f(eps)||
  bool product_matches_schedule = false;
  double threshold_t1 = 0.0;
  double threshold_t2 = 0.0;
  double sup_theta_far_t2 = 0.0;
};

PerturbationReport perturbation_smallness_report(const std::vector<Field>& trajectory,
                                                 const DegeneracyFunction& f, double n,
                                                 double eps, double t1, double t2,
                                                 std::optional<double> expected_product = {});

std::string convergence_csv(const ConvergenceTable& table);
std::string plot_data_csv(const ConvergenceTable& table);
nlohmann::json sweep_summary(const ConvergenceTable& table, int sign_of_phi,
                             double clamped_fraction);

} // namespace polyheat
