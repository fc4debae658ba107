#include "richards/theory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "richards/constitutive.hpp"
#include "richards/fem.hpp"
#include "richards/io.hpp"

namespace richards {

double theoretical_rate(const TheoryInputs& in) {
  if (!(in.L > 0.0) || !(in.K_m > 0.0) || !(in.tau > 0.0) || !(in.C_omega > 0.0))
    throw std::invalid_argument("theoretical_rate: inputs must be positive");
  return std::sqrt(in.L / (in.L + in.K_m * in.tau / (in.C_omega * in.C_omega)));
}

ConditionCheck lscheme_condition(const TheoryInputs& in) {
  double slack = 2.0 / in.L_theta - 1.0 / in.L -
                 in.tau * (in.M + 1.0) * (in.M + 1.0) * in.L_K * in.L_K / in.K_m;
  return {slack >= 0.0, slack};
}

ConditionCheck lscheme_condition_constant_k(double L, double L_theta) {
  double slack = L - L_theta / 2.0;
  return {slack >= 0.0, slack};
}

double poincare_constant(const Rectangle& domain) {
  domain.validate();
  return domain.diameter() / std::numbers::pi;
}

std::vector<double> compute_tight_reference(const Problem& problem,
                                            std::span<const double> state_prev, double t,
                                            double L, double tau, double tol, int max_iter) {
  std::vector<double> iterate(state_prev.begin(), state_prev.end());
  DirichletData bc = evaluate_dirichlet(problem.mesh, problem.profiles, t);
  impose_dirichlet(iterate, bc);
  for (int j = 0; j < max_iter; ++j) {
    StepResult step = step_l_scheme(problem, state_prev, iterate, L, tau, t);
    double upd = 0.0;
    for (std::size_t i = 0; i < iterate.size(); ++i) {
      double d = step.next[i] - iterate[i];
      upd += d * d;
    }
    iterate = std::move(step.next);
    if (std::sqrt(upd) <= tol) return iterate;
  }
  throw std::runtime_error("compute_tight_reference: no convergence to tolerance");
}

std::vector<double> measure_contraction(const Problem& problem,
                                        std::span<const double> state_prev, double t, double L,
                                        double tau, std::span<const double> reference,
                                        int max_ratios) {
  const SparseMatrix mass = assemble_weighted_mass(problem.mesh, 1.0);
  auto error_norm = [&](std::span<const double> v) {
    std::vector<double> e(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) e[i] = v[i] - reference[i];
    std::vector<double> me = mass.multiply(e);
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) s += e[i] * me[i];
    return std::sqrt(std::max(s, 0.0));
  };

  std::vector<double> iterate(state_prev.begin(), state_prev.end());
  DirichletData bc = evaluate_dirichlet(problem.mesh, problem.profiles, t);
  impose_dirichlet(iterate, bc);

  double ref_scale = 0.0;
  for (double v : reference) ref_scale = std::max(ref_scale, std::abs(v));
  const double floor = 1e-11 * (1.0 + ref_scale);

  std::vector<double> ratios;
  double prev_err = error_norm(iterate);
  for (int j = 0; j < max_ratios && prev_err > floor; ++j) {
    StepResult step = step_l_scheme(problem, state_prev, iterate, L, tau, t);
    iterate = std::move(step.next);
    double err = error_norm(iterate);
    ratios.push_back(err / prev_err);
    prev_err = err;
  }
  return ratios;
}

namespace {

const VanGenuchtenParams& contraction_soil() {
  static const VanGenuchtenParams p{0.026, 0.42, 0.95, 2.9, 0.12};
  return p;
}

}  // namespace

double contraction_problem_l_theta() {
  return lipschitz_info(contraction_soil(), -50.0, 0.0).L_theta;
}

Problem make_contraction_problem(int nx, int nz, double k_const) {
  Problem prob;
  prob.mesh = tag_boundary(build_structured({0.0, 1.0, 0.0, 1.0}, nx, nz),
                           [](double, double) { return BoundaryTag::fixed(0.0); });
  VanGenuchtenParams p = contraction_soil();
  prob.model.theta = [p](double psi) { return water_content(p, psi); };
  prob.model.dtheta = [p](double psi) { return dtheta_dpsi(p, psi); };
  prob.model.k = [k_const](double) { return k_const; };
  prob.model.dk = [](double) { return 0.0; };
  return prob;
}

std::vector<ContractionCase> default_contraction_cases() {
  const double l_theta = contraction_problem_l_theta();
  std::vector<ContractionCase> cases;
  for (int cells : {10, 20})
    for (double mult : {0.5, 1.0, 2.0, 4.0})
      for (double tau : {0.01, 0.1, 1.0})
        cases.push_back({cells, cells, mult * l_theta, tau});
  return cases;
}

std::vector<ContractionRow> run_contraction_sweep(std::span<const ContractionCase> cases) {
  const double l_theta = contraction_problem_l_theta();
  const double k_const = 1.0;
  std::vector<ContractionRow> rows;
  rows.reserve(cases.size());
  for (const ContractionCase& c : cases) {
    Problem prob = make_contraction_problem(c.nx, c.nz, k_const);
    std::vector<double> initial =
        interpolate_nodal(prob.mesh, [](double, double) { return -2.0; });

    ContractionRow row;
    row.L = c.L;
    row.tau = c.tau;
    row.K_m = k_const;
    row.C_omega = poincare_constant(prob.mesh.domain());
    row.nx = c.nx;
    row.nz = c.nz;
    TheoryInputs in;
    in.L = c.L;
    in.L_theta = l_theta;
    in.K_m = k_const;
    in.tau = c.tau;
    in.C_omega = row.C_omega;
    row.rate = theoretical_rate(in);
    row.slack = lscheme_condition_constant_k(c.L, l_theta).slack;

    std::vector<double> reference =
        compute_tight_reference(prob, initial, c.tau, c.L, c.tau);
    std::vector<double> ratios =
        measure_contraction(prob, initial, c.tau, c.L, c.tau, reference);
    row.ratios_measured = static_cast<int>(ratios.size());
    row.max_ratio = 0.0;
    for (double r : ratios) row.max_ratio = std::max(row.max_ratio, r);
    rows.push_back(row);
  }
  return rows;
}

void write_contraction_csv(std::span<const ContractionRow> rows, const std::string& path) {
  CsvWriter csv;
  csv.header({"L", "tau", "K_m", "C_omega", "theoretical_rate", "max_measured_ratio",
              "condition_slack"});
  for (const ContractionRow& r : rows) {
    csv.begin_row();
    csv.field(r.L);
    csv.field(r.tau);
    csv.field(r.K_m);
    csv.field(r.C_omega);
    csv.field(r.rate);
    csv.field(r.max_ratio);
    csv.field(r.slack);
  }
  csv.write_atomic(path);
}

}  // namespace richards
