#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "richards/constitutive.hpp"
#include "richards/fem.hpp"
#include "richards/mesh.hpp"

namespace richards {

/// Scalar constitutive relations as functions of the pressure head. The van
/// Genuchten factory wires the analytic curves; synthetic models (constant
/// conductivity, linear water content) plug in the same way.
struct ConstitutiveModel {
  std::function<double(double)> theta;
  std::function<double(double)> dtheta;
  std::function<double(double)> k;
  std::function<double(double)> dk;

  static ConstitutiveModel van_genuchten(const VanGenuchtenParams& p);
};

/// One flow problem: tagged mesh, constitutive model, source and the
/// transient Dirichlet profiles referenced by the boundary tags.
struct Problem {
  Mesh mesh;
  ConstitutiveModel model;
  TimeField source;  // null means zero
  std::vector<TimeProfile> profiles;
};

enum class Linearization { l_scheme, modified_picard, newton };

std::string to_string(Linearization lin);

/// Switch criterion of a mixed scheme: either an update-norm threshold
/// (delta_a + delta_r * |psi|) or a fixed number of robust iterations.
struct SwitchRule {
  double delta_a = 0.0;
  double delta_r = 0.0;
  int fixed_iterations = 0;

  bool uses_fixed_count() const { return fixed_iterations > 0; }
  void validate() const;

  static SwitchRule threshold(double delta_a, double delta_r) { return {delta_a, delta_r, 0}; }
  static SwitchRule fixed_count(int iterations) { return {0.0, 0.0, iterations}; }
};

struct StoppingRule {
  double eps_a = 1e-5;
  double eps_r = 1e-5;
  int max_iter = 50;

  void validate() const;
};

/// Which linearization runs a time step: one of the plain iterations, or a
/// robust first stage (L-scheme or modified Picard) switched permanently to
/// Newton once the switch rule fires.
///
/// For a fixed-count switch rule, `escalate_robust_on_failure` retries a
/// failed time step with the robust iteration count raised by two, up to
/// ten. Off by default.
struct SchemeSpec {
  enum class Kind { l_scheme, modified_picard, newton, mixed };

  Kind kind = Kind::l_scheme;
  double L = 0.0;                                         // L-scheme stabilization
  Linearization mixed_first = Linearization::l_scheme;    // mixed only
  SwitchRule switch_rule;                                 // mixed only
  bool escalate_robust_on_failure = false;                // mixed, fixed-count only
  StoppingRule stopping;

  static SchemeSpec l_scheme(double L, StoppingRule stop = {});
  static SchemeSpec modified_picard(StoppingRule stop = {});
  static SchemeSpec newton(StoppingRule stop = {});
  static SchemeSpec mixed(Linearization first, double L, SwitchRule sw, StoppingRule stop = {});

  void validate() const;
  std::string name() const;
  std::string slug() const;  // filesystem-safe name
};

enum class FailureReason { none, max_iterations, diverged, linear_solver };

std::string to_string(FailureReason r);

struct IterationRecord {
  double update_norm = 0.0;   // |psi^j - psi^{j-1}|_2, coefficient vector
  double iterate_norm = 0.0;  // |psi^j|_2
  Linearization scheme_active = Linearization::l_scheme;
  double condition_estimate = 0.0;
  double wall_time_s = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  FailureReason failure = FailureReason::none;
  std::string failure_detail;
  int retry_attempts = 0;  // escalation retries before this trace's attempt

  int total_iterations() const { return static_cast<int>(iterations.size()); }
  int iterations_with(Linearization lin) const;
  double total_wall_time() const;
  /// Mean condition estimate over iterations of `lin` (finite entries only).
  double mean_condest(Linearization lin) const;
  double mean_condest_all() const;
};

/// Full linear system of one linearization step, before Dirichlet
/// elimination. Exposed for the scheme-equivalence checks.
struct LinearizedSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

LinearizedSystem build_linearized_system(const Problem& problem, Linearization lin, double L,
                                         std::span<const double> state_prev,
                                         std::span<const double> iterate, double tau, double t);

struct StepResult {
  std::vector<double> next;  // full coefficient vector
  double condition_estimate = 0.0;
};

// One linearization step at time t (Dirichlet data evaluated at t). Throws
// SingularMatrixError on solver failure.
StepResult step_l_scheme(const Problem& problem, std::span<const double> state_prev,
                         std::span<const double> iterate, double L, double tau, double t);
StepResult step_modified_picard(const Problem& problem, std::span<const double> state_prev,
                                std::span<const double> iterate, double tau, double t);
StepResult step_newton(const Problem& problem, std::span<const double> state_prev,
                       std::span<const double> iterate, double tau, double t);

/// One backward Euler step solved with the requested scheme. The initial
/// iterate is the previous state with Dirichlet nodes overwritten by the
/// boundary values at t_n, so boundary ramping does not pollute the first
/// update norm. Runtime failures are recorded in the trace, not thrown.
struct TimeStepResult {
  std::vector<double> state;
  IterationTrace trace;
};

TimeStepResult solve_time_step(const Problem& problem, std::span<const double> state_prev,
                               double t_n, double tau, const SchemeSpec& spec);

struct StepRecord {
  double t = 0.0;
  std::vector<double> field;
  IterationTrace trace;
};

struct SimulationResult {
  std::vector<StepRecord> steps;
  bool converged = false;
  int failed_step = -1;  // first failing step index, -1 if none

  int total_iterations() const;
  int iterations_with(Linearization lin) const;
  double total_wall_time() const;
  double mean_condest_all() const;
  double mean_condest(Linearization lin) const;
};

/// Sequential backward Euler steps n = 1..num_steps at t_n = n tau, started
/// from the nodal initial state. Remaining steps are skipped after a step
/// fails.
SimulationResult run_simulation(const Problem& problem, std::span<const double> initial_state,
                                double tau, int num_steps, const SchemeSpec& spec);

}  // namespace richards
