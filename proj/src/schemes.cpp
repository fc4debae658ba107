#include "richards/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace richards {

namespace {

constexpr double kDivergenceGuard = 1e8;

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double diff_norm(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

ConstitutiveModel ConstitutiveModel::van_genuchten(const VanGenuchtenParams& p) {
  p.validate();
  ConstitutiveModel m;
  m.theta = [p](double psi) { return water_content(p, psi); };
  m.dtheta = [p](double psi) { return dtheta_dpsi(p, psi); };
  m.k = [p](double psi) { return conductivity(p, psi); };
  m.dk = [p](double psi) { return dK_dpsi(p, psi); };
  return m;
}

std::string to_string(Linearization lin) {
  switch (lin) {
    case Linearization::l_scheme: return "L-scheme";
    case Linearization::modified_picard: return "Picard";
    case Linearization::newton: return "Newton";
  }
  return "?";
}

void SwitchRule::validate() const {
  if (uses_fixed_count()) {
    if (fixed_iterations < 1)
      throw std::invalid_argument("SwitchRule: fixed_iterations must be >= 1");
  } else {
    if (delta_a < 0.0 || delta_r < 0.0 || (delta_a == 0.0 && delta_r == 0.0))
      throw std::invalid_argument("SwitchRule: need delta_a, delta_r >= 0, not both zero");
  }
}

void StoppingRule::validate() const {
  if (!(eps_a > 0.0) || !(eps_r > 0.0))
    throw std::invalid_argument("StoppingRule: tolerances must be positive");
  if (max_iter < 1) throw std::invalid_argument("StoppingRule: max_iter must be >= 1");
}

SchemeSpec SchemeSpec::l_scheme(double L, StoppingRule stop) {
  SchemeSpec s;
  s.kind = Kind::l_scheme;
  s.L = L;
  s.stopping = stop;
  s.validate();
  return s;
}

SchemeSpec SchemeSpec::modified_picard(StoppingRule stop) {
  SchemeSpec s;
  s.kind = Kind::modified_picard;
  s.stopping = stop;
  s.validate();
  return s;
}

SchemeSpec SchemeSpec::newton(StoppingRule stop) {
  SchemeSpec s;
  s.kind = Kind::newton;
  s.stopping = stop;
  s.validate();
  return s;
}

SchemeSpec SchemeSpec::mixed(Linearization first, double L, SwitchRule sw, StoppingRule stop) {
  if (first == Linearization::newton)
    throw std::invalid_argument("SchemeSpec: mixed first stage must be robust");
  SchemeSpec s;
  s.kind = Kind::mixed;
  s.mixed_first = first;
  s.L = L;
  s.switch_rule = sw;
  s.stopping = stop;
  s.validate();
  return s;
}

void SchemeSpec::validate() const {
  stopping.validate();
  if (kind == Kind::l_scheme && !(L > 0.0))
    throw std::invalid_argument("SchemeSpec: L-scheme needs L > 0");
  if (kind == Kind::mixed) {
    switch_rule.validate();
    if (mixed_first == Linearization::l_scheme && !(L > 0.0))
      throw std::invalid_argument("SchemeSpec: mixed L-scheme stage needs L > 0");
  }
  if (escalate_robust_on_failure &&
      (kind != Kind::mixed || !switch_rule.uses_fixed_count()))
    throw std::invalid_argument(
        "SchemeSpec: escalation requires a mixed scheme with a fixed-count switch");
}

namespace {

std::string format_l(double L) {
  std::ostringstream os;
  os << L;
  return os.str();
}

}  // namespace

std::string SchemeSpec::name() const {
  switch (kind) {
    case Kind::l_scheme: return "L-scheme(" + format_l(L) + ")";
    case Kind::modified_picard: return "Picard";
    case Kind::newton: return "Newton";
    case Kind::mixed:
      if (mixed_first == Linearization::l_scheme)
        return "L-scheme(" + format_l(L) + ")/Newton";
      return "Picard/Newton";
  }
  return "?";
}

std::string SchemeSpec::slug() const {
  std::string s = name();
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string to_string(FailureReason r) {
  switch (r) {
    case FailureReason::none: return "";
    case FailureReason::max_iterations: return "max_iterations";
    case FailureReason::diverged: return "diverged";
    case FailureReason::linear_solver: return "linear_solver";
  }
  return "?";
}

int IterationTrace::iterations_with(Linearization lin) const {
  int c = 0;
  for (const IterationRecord& r : iterations)
    if (r.scheme_active == lin) ++c;
  return c;
}

double IterationTrace::total_wall_time() const {
  double s = 0.0;
  for (const IterationRecord& r : iterations) s += r.wall_time_s;
  return s;
}

namespace {

double mean_condest_impl(const std::vector<IterationRecord>& records,
                         const std::function<bool(const IterationRecord&)>& take) {
  double sum = 0.0;
  int count = 0;
  for (const IterationRecord& r : records) {
    if (take(r) && std::isfinite(r.condition_estimate)) {
      sum += r.condition_estimate;
      ++count;
    }
  }
  return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double IterationTrace::mean_condest(Linearization lin) const {
  return mean_condest_impl(iterations,
                           [lin](const IterationRecord& r) { return r.scheme_active == lin; });
}

double IterationTrace::mean_condest_all() const {
  return mean_condest_impl(iterations, [](const IterationRecord&) { return true; });
}

LinearizedSystem build_linearized_system(const Problem& problem, Linearization lin, double L,
                                         std::span<const double> state_prev,
                                         std::span<const double> iterate, double tau,
                                         double t) {
  const Mesh& mesh = problem.mesh;
  const ConstitutiveModel& model = problem.model;

  // Time term: L-scheme uses the constant stabilization weight, the others
  // the analytic theta' at the iterate. Same assembly path, so replacing
  // theta' by a constant reproduces the L-scheme bit for bit.
  SparseMatrix time_mass =
      (lin == Linearization::l_scheme)
          ? assemble_weighted_mass(mesh, iterate, [L](double) { return L; })
          : assemble_weighted_mass(mesh, iterate, model.dtheta);
  SparseMatrix stiffness = assemble_weighted_stiffness(mesh, iterate, model.k);

  LinearizedSystem sys;
  sys.matrix = SparseMatrix::linear_combination(1.0, time_mass, tau, stiffness);

  std::vector<double> theta_prev = assemble_theta_load(mesh, state_prev, model.theta);
  std::vector<double> theta_iter = assemble_theta_load(mesh, iterate, model.theta);
  std::vector<double> gravity = assemble_gravity(mesh, iterate, model.k);
  std::vector<double> mass_iter = time_mass.multiply(iterate);

  int n = mesh.num_nodes();
  sys.rhs.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    sys.rhs[i] = theta_prev[i] - theta_iter[i] + mass_iter[i] - tau * gravity[i];
  if (problem.source) {
    std::vector<double> src = assemble_source(mesh, problem.source, t);
    for (int i = 0; i < n; ++i) sys.rhs[i] += tau * src[i];
  }

  if (lin == Linearization::newton) {
    if (!model.dk)
      throw std::invalid_argument("build_linearized_system: Newton needs dK/dpsi");
    SparseMatrix advection = assemble_newton_advection(mesh, iterate, model.dk);
    sys.matrix = SparseMatrix::linear_combination(1.0, sys.matrix, tau, advection);
    std::vector<double> adv_iter = advection.multiply(iterate);
    for (int i = 0; i < n; ++i) sys.rhs[i] += tau * adv_iter[i];
  }
  return sys;
}

namespace {

StepResult solve_linearized(const Problem& problem, Linearization lin, double L,
                            std::span<const double> state_prev,
                            std::span<const double> iterate, double tau, double t) {
  LinearizedSystem sys = build_linearized_system(problem, lin, L, state_prev, iterate, tau, t);
  DirichletData bc = evaluate_dirichlet(problem.mesh, problem.profiles, t);
  AssembledSystem reduced = apply_dirichlet(sys.matrix, sys.rhs, problem.mesh, bc);
  LuFactorization lu = LuFactorization::compute(reduced.matrix);
  std::vector<double> x = lu.solve(reduced.rhs);
  StepResult out;
  out.next = reduced.scatter(x);
  out.condition_estimate = condest_1norm(lu, reduced.matrix);
  return out;
}

}  // namespace

StepResult step_l_scheme(const Problem& problem, std::span<const double> state_prev,
                         std::span<const double> iterate, double L, double tau, double t) {
  if (!(L > 0.0)) throw std::invalid_argument("step_l_scheme: L must be > 0");
  return solve_linearized(problem, Linearization::l_scheme, L, state_prev, iterate, tau, t);
}

StepResult step_modified_picard(const Problem& problem, std::span<const double> state_prev,
                                std::span<const double> iterate, double tau, double t) {
  return solve_linearized(problem, Linearization::modified_picard, 0.0, state_prev, iterate,
                          tau, t);
}

StepResult step_newton(const Problem& problem, std::span<const double> state_prev,
                       std::span<const double> iterate, double tau, double t) {
  return solve_linearized(problem, Linearization::newton, 0.0, state_prev, iterate, tau, t);
}

namespace {

TimeStepResult solve_time_step_once(const Problem& problem, std::span<const double> state_prev,
                                    double t_n, double tau, const SchemeSpec& spec) {
  TimeStepResult result;
  result.state.assign(state_prev.begin(), state_prev.end());

  DirichletData bc = evaluate_dirichlet(problem.mesh, problem.profiles, t_n);
  impose_dirichlet(result.state, bc);

  Linearization active = spec.kind == SchemeSpec::Kind::modified_picard
                             ? Linearization::modified_picard
                         : spec.kind == SchemeSpec::Kind::newton ? Linearization::newton
                         : spec.kind == SchemeSpec::Kind::mixed  ? spec.mixed_first
                                                                 : Linearization::l_scheme;
  bool switched = spec.kind != SchemeSpec::Kind::mixed;
  int robust_iterations = 0;

  for (int j = 1; j <= spec.stopping.max_iter; ++j) {
    auto started = std::chrono::steady_clock::now();
    StepResult step;
    try {
      step = solve_linearized(problem, active, spec.L, state_prev, result.state, tau, t_n);
    } catch (const SingularMatrixError& e) {
      result.trace.failure = FailureReason::linear_solver;
      result.trace.failure_detail = e.what();
      return result;
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                         .count();

    IterationRecord rec;
    rec.update_norm = diff_norm(step.next, result.state);
    rec.iterate_norm = euclidean_norm(step.next);
    rec.scheme_active = active;
    rec.condition_estimate = step.condition_estimate;
    rec.wall_time_s = elapsed;
    result.trace.iterations.push_back(rec);

    if (!std::isfinite(rec.update_norm) || rec.update_norm > kDivergenceGuard) {
      result.trace.failure = FailureReason::diverged;
      result.trace.failure_detail = "update norm " + std::to_string(rec.update_norm);
      return result;
    }

    result.state = std::move(step.next);

    if (rec.update_norm <= spec.stopping.eps_a + spec.stopping.eps_r * rec.iterate_norm) {
      result.trace.converged = true;
      return result;
    }

    if (!switched) {
      ++robust_iterations;
      bool fire = spec.switch_rule.uses_fixed_count()
                      ? robust_iterations >= spec.switch_rule.fixed_iterations
                      : rec.update_norm <= spec.switch_rule.delta_a +
                                               spec.switch_rule.delta_r * rec.iterate_norm;
      if (fire) {
        active = Linearization::newton;
        switched = true;
      }
    }
  }

  result.trace.failure = FailureReason::max_iterations;
  result.trace.failure_detail =
      "no convergence within " + std::to_string(spec.stopping.max_iter) + " iterations";
  return result;
}

}  // namespace

TimeStepResult solve_time_step(const Problem& problem, std::span<const double> state_prev,
                               double t_n, double tau, const SchemeSpec& spec) {
  spec.validate();
  TimeStepResult result = solve_time_step_once(problem, state_prev, t_n, tau, spec);
  if (!spec.escalate_robust_on_failure) return result;

  // Retry a failed step with more robust iterations before the Newton
  // handover, raising the count by two up to ten.
  constexpr int kMaxRobust = 10;
  SchemeSpec retry = spec;
  int attempts = 0;
  while (!result.trace.converged && retry.switch_rule.fixed_iterations < kMaxRobust) {
    retry.switch_rule.fixed_iterations =
        std::min(retry.switch_rule.fixed_iterations + 2, kMaxRobust);
    result = solve_time_step_once(problem, state_prev, t_n, tau, retry);
    result.trace.retry_attempts = ++attempts;
  }
  return result;
}

int SimulationResult::total_iterations() const {
  int c = 0;
  for (const StepRecord& s : steps) c += s.trace.total_iterations();
  return c;
}

int SimulationResult::iterations_with(Linearization lin) const {
  int c = 0;
  for (const StepRecord& s : steps) c += s.trace.iterations_with(lin);
  return c;
}

double SimulationResult::total_wall_time() const {
  double t = 0.0;
  for (const StepRecord& s : steps) t += s.trace.total_wall_time();
  return t;
}

namespace {

double pooled_condest(const std::vector<StepRecord>& steps,
                      const std::function<bool(const IterationRecord&)>& take) {
  double sum = 0.0;
  int count = 0;
  for (const StepRecord& s : steps) {
    for (const IterationRecord& r : s.trace.iterations) {
      if (take(r) && std::isfinite(r.condition_estimate)) {
        sum += r.condition_estimate;
        ++count;
      }
    }
  }
  return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double SimulationResult::mean_condest_all() const {
  return pooled_condest(steps, [](const IterationRecord&) { return true; });
}

double SimulationResult::mean_condest(Linearization lin) const {
  return pooled_condest(steps,
                        [lin](const IterationRecord& r) { return r.scheme_active == lin; });
}

SimulationResult run_simulation(const Problem& problem, std::span<const double> initial_state,
                                double tau, int num_steps, const SchemeSpec& spec) {
  if (num_steps < 1) throw std::invalid_argument("run_simulation: num_steps must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("run_simulation: tau must be > 0");
  if (static_cast<int>(initial_state.size()) != problem.mesh.num_nodes())
    throw std::invalid_argument("run_simulation: initial state size mismatch");

  SimulationResult result;
  result.converged = true;
  std::vector<double> state(initial_state.begin(), initial_state.end());
  for (int n = 1; n <= num_steps; ++n) {
    double t_n = n * tau;
    TimeStepResult step = solve_time_step(problem, state, t_n, tau, spec);
    bool ok = step.trace.converged;
    result.steps.push_back({t_n, step.state, std::move(step.trace)});
    if (!ok) {
      result.converged = false;
      result.failed_step = n - 1;
      break;
    }
    state = result.steps.back().field;
  }
  return result;
}

}  // namespace richards
