#pragma once

#include <span>
#include <string>
#include <vector>

#include "richards/mesh.hpp"
#include "richards/schemes.hpp"

namespace richards {

/// Constants entering the L-scheme convergence statement.
struct TheoryInputs {
  double L = 0.0;        // stabilization constant
  double L_theta = 0.0;  // Lipschitz constant of theta
  double L_K = 0.0;      // Lipschitz constant of K (0 for constant K)
  double K_m = 0.0;      // lower conductivity bound
  double M = 0.0;        // sup-norm bound of grad psi_h^n
  double tau = 0.0;
  double C_omega = 0.0;  // Poincare constant
  int dim = 2;
};

/// Linear contraction rate sqrt(L / (L + K_m tau / C_omega^2)).
double theoretical_rate(const TheoryInputs& in);

struct ConditionCheck {
  bool satisfied = false;
  double slack = 0.0;
};

/// General convergence condition: slack = 2/L_theta - 1/L - tau (M+1)^2 L_K^2 / K_m.
ConditionCheck lscheme_condition(const TheoryInputs& in);

/// Constant-conductivity variant: L >= L_theta / 2, no time step restriction.
ConditionCheck lscheme_condition_constant_k(double L, double L_theta);

/// Poincare constant diam(Omega)/pi, a valid upper bound on convex domains.
double poincare_constant(const Rectangle& domain);

/// Iterates the L-scheme to update norm <= tol and returns the fixed point.
/// Throws if the tolerance is not reached within max_iter iterations.
std::vector<double> compute_tight_reference(const Problem& problem,
                                            std::span<const double> state_prev, double t,
                                            double L, double tau, double tol = 1e-12,
                                            int max_iter = 20000);

/// Per-iteration error contraction ratios |e^j|_M / |e^{j-1}|_M of the
/// L-scheme against a tight reference, in the discrete L2 (mass matrix)
/// norm. Measurement stops at max_ratios or when the error reaches the
/// round-off floor; a converged start yields an empty list.
std::vector<double> measure_contraction(const Problem& problem,
                                        std::span<const double> state_prev, double t, double L,
                                        double tau, std::span<const double> reference,
                                        int max_ratios = 40);

/// One configuration of the contraction study (constant conductivity,
/// homogeneous Dirichlet data on the whole boundary).
struct ContractionCase {
  int nx = 10, nz = 10;
  double L = 0.0;
  double tau = 0.0;
};

struct ContractionRow {
  double L = 0.0, tau = 0.0, K_m = 0.0, C_omega = 0.0;
  double rate = 0.0;        // theoretical bound
  double max_ratio = 0.0;   // measured
  double slack = 0.0;       // constant-K condition slack
  int ratios_measured = 0;
  int nx = 0, nz = 0;
};

/// Constant-conductivity test problem on the unit square: van Genuchten
/// water content of a reference soil, K = k_const, zero source, homogeneous
/// Dirichlet boundary, uniform initial pressure -2.
Problem make_contraction_problem(int nx, int nz, double k_const);

/// L_theta of the water content curve used by make_contraction_problem.
double contraction_problem_l_theta();

/// Runs measure_contraction over the given cases with K = 1.
std::vector<ContractionRow> run_contraction_sweep(std::span<const ContractionCase> cases);

/// Default sweep: L in {L_theta/2, L_theta, 2 L_theta, 4 L_theta},
/// tau in {0.01, 0.1, 1}, meshes 10x10 and 20x20 (24 cases).
std::vector<ContractionCase> default_contraction_cases();

/// CSV with columns L,tau,K_m,C_omega,theoretical_rate,max_measured_ratio,
/// condition_slack. Written atomically.
void write_contraction_csv(std::span<const ContractionRow> rows, const std::string& path);

}  // namespace richards
