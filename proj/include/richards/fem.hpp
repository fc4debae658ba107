#pragma once

#include <functional>
#include <span>
#include <vector>

#include "richards/mesh.hpp"
#include "richards/sparse.hpp"

namespace richards {

/// Scalar coefficient evaluated at the P1-interpolated iterate value, e.g.
/// psi -> K(psi) or psi -> theta'(psi).
using PsiWeight = std::function<double(double)>;

/// Time-dependent spatial field f(x, z, t).
using TimeField = std::function<double(double, double, double)>;

/// Dirichlet profile psi_D(x, z, t) referenced by BoundaryTag::profile.
using TimeProfile = std::function<double(double, double, double)>;

// Weighted mass matrix M_ab = int w(psi_h) phi_a phi_b.
SparseMatrix assemble_weighted_mass(const Mesh& mesh, double w);
SparseMatrix assemble_weighted_mass(const Mesh& mesh, std::span<const double> field,
                                    const PsiWeight& w);

// Weighted stiffness A_ab = int k(psi_h) grad phi_a . grad phi_b.
SparseMatrix assemble_weighted_stiffness(const Mesh& mesh, double k);
SparseMatrix assemble_weighted_stiffness(const Mesh& mesh, std::span<const double> field,
                                         const PsiWeight& k);

// Gravity load g_a = int k(psi_h) e_z . grad phi_a, e_z = (0, 1).
std::vector<double> assemble_gravity(const Mesh& mesh, double k);
std::vector<double> assemble_gravity(const Mesh& mesh, std::span<const double> field,
                                     const PsiWeight& k);

// Water content load b_a = int theta(psi_h) phi_a.
std::vector<double> assemble_theta_load(const Mesh& mesh, std::span<const double> field,
                                        const PsiWeight& theta);

// Source load b_a = int f(., t) phi_a.
std::vector<double> assemble_source(const Mesh& mesh, const TimeField& f, double t);

// Newton advection block N_ab = int k'(psi_h) (grad psi_h + e_z) . grad phi_a phi_b.
// Nonsymmetric: trial value against test gradient.
SparseMatrix assemble_newton_advection(const Mesh& mesh, std::span<const double> field,
                                       const PsiWeight& kprime);

/// Dirichlet node data at a fixed time.
struct DirichletData {
  std::vector<char> is_dirichlet;  // per node
  std::vector<double> value;       // per node, 0 where free
  int count = 0;
};

/// Evaluates the boundary tags at time t. Fixed tags use their stored value,
/// transient tags their profile at the node position. A node reached with
/// two different values is a conflict and throws.
DirichletData evaluate_dirichlet(const Mesh& mesh, std::span<const TimeProfile> profiles,
                                 double t);

/// Overwrites Dirichlet nodes of `field` with their boundary values.
void impose_dirichlet(std::span<double> field, const DirichletData& d);

/// Linear system over free nodes after elimination with lifting:
/// A_ff x_f = b_f - A_fc psi_D.
struct AssembledSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::vector<int> free_nodes;    // free index -> node index
  std::vector<int> node_to_free;  // node index -> free index, -1 if constrained
  DirichletData dirichlet;

  /// Full-length vector: solved free values plus Dirichlet values.
  std::vector<double> scatter(std::span<const double> x_free) const;
};

AssembledSystem apply_dirichlet(const SparseMatrix& a, std::span<const double> b,
                                const Mesh& mesh, const DirichletData& d);

/// Max Euclidean norm of the element gradients of a P1 field.
double max_gradient_norm(const Mesh& mesh, std::span<const double> field);

}  // namespace richards
