#include "richards/fem.hpp"

#include <array>
#include <cmath>
#include <string>

#include "richards/quadrature.hpp"

namespace richards {

namespace {

struct ElementGeometry {
  std::array<int, 3> nodes;
  std::array<double, 3> x, z;
  std::array<double, 2> grad[3];  // constant gradients of the hat functions
  double area;
};

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  ElementGeometry g;
  g.nodes = mesh.triangles()[static_cast<std::size_t>(t)];
  for (int v = 0; v < 3; ++v) {
    g.x[v] = mesh.nodes()[g.nodes[v]].x;
    g.z[v] = mesh.nodes()[g.nodes[v]].z;
  }
  double det = (g.x[1] - g.x[0]) * (g.z[2] - g.z[0]) - (g.x[2] - g.x[0]) * (g.z[1] - g.z[0]);
  g.area = 0.5 * det;
  for (int v = 0; v < 3; ++v) {
    int s = (v + 1) % 3, u = (v + 2) % 3;
    g.grad[v][0] = (g.z[s] - g.z[u]) / det;
    g.grad[v][1] = (g.x[u] - g.x[s]) / det;
  }
  return g;
}

using QuadKernel =
    std::function<void(const ElementGeometry&, const std::array<double, 3>& bary, double x,
                       double z, double psi, double qweight)>;

// Shared quadrature loop: interpolates the P1 field and hands each point to
// the kernel with the scaled weight |T| * w_q.
void for_each_quad_point(const Mesh& mesh, std::span<const double> field,
                         const QuadKernel& kernel) {
  const QuadratureRule& rule = QuadratureRule::degree4();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& bary = rule.points[q];
      double x = bary[0] * g.x[0] + bary[1] * g.x[1] + bary[2] * g.x[2];
      double z = bary[0] * g.z[0] + bary[1] * g.z[1] + bary[2] * g.z[2];
      double psi = 0.0;
      if (!field.empty())
        psi = bary[0] * field[g.nodes[0]] + bary[1] * field[g.nodes[1]] +
              bary[2] * field[g.nodes[2]];
      kernel(g, bary, x, z, psi, g.area * rule.weights[q]);
    }
  }
}

std::vector<double> zero_field(const Mesh& mesh) {
  return std::vector<double>(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
}

}  // namespace

SparseMatrix assemble_weighted_mass(const Mesh& mesh, std::span<const double> field,
                                    const PsiWeight& w) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
  for_each_quad_point(mesh, field,
                      [&](const ElementGeometry& g, const std::array<double, 3>& bary, double,
                          double, double psi, double qw) {
                        double wq = w(psi) * qw;
                        for (int a = 0; a < 3; ++a)
                          for (int b = 0; b < 3; ++b)
                            trips.push_back({g.nodes[a], g.nodes[b], wq * bary[a] * bary[b]});
                      });
  return SparseMatrix::from_triplets(mesh.num_nodes(), std::move(trips));
}

SparseMatrix assemble_weighted_mass(const Mesh& mesh, double w) {
  return assemble_weighted_mass(mesh, zero_field(mesh), [w](double) { return w; });
}

SparseMatrix assemble_weighted_stiffness(const Mesh& mesh, std::span<const double> field,
                                         const PsiWeight& k) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
  for_each_quad_point(
      mesh, field,
      [&](const ElementGeometry& g, const std::array<double, 3>&, double, double, double psi,
          double qw) {
        double kq = k(psi) * qw;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            trips.push_back({g.nodes[a], g.nodes[b],
                             kq * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1])});
      });
  return SparseMatrix::from_triplets(mesh.num_nodes(), std::move(trips));
}

SparseMatrix assemble_weighted_stiffness(const Mesh& mesh, double k) {
  return assemble_weighted_stiffness(mesh, zero_field(mesh), [k](double) { return k; });
}

std::vector<double> assemble_gravity(const Mesh& mesh, std::span<const double> field,
                                     const PsiWeight& k) {
  std::vector<double> g_vec(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
  for_each_quad_point(mesh, field,
                      [&](const ElementGeometry& g, const std::array<double, 3>&, double,
                          double, double psi, double qw) {
                        double kq = k(psi) * qw;
                        for (int a = 0; a < 3; ++a) g_vec[g.nodes[a]] += kq * g.grad[a][1];
                      });
  return g_vec;
}

std::vector<double> assemble_gravity(const Mesh& mesh, double k) {
  return assemble_gravity(mesh, zero_field(mesh), [k](double) { return k; });
}

std::vector<double> assemble_theta_load(const Mesh& mesh, std::span<const double> field,
                                        const PsiWeight& theta) {
  std::vector<double> b(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
  for_each_quad_point(mesh, field,
                      [&](const ElementGeometry& g, const std::array<double, 3>& bary, double,
                          double, double psi, double qw) {
                        double tq = theta(psi) * qw;
                        for (int a = 0; a < 3; ++a) b[g.nodes[a]] += tq * bary[a];
                      });
  return b;
}

std::vector<double> assemble_source(const Mesh& mesh, const TimeField& f, double t) {
  std::vector<double> b(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
  for_each_quad_point(mesh, {},
                      [&](const ElementGeometry& g, const std::array<double, 3>& bary,
                          double x, double z, double, double qw) {
                        double fq = f(x, z, t) * qw;
                        for (int a = 0; a < 3; ++a) b[g.nodes[a]] += fq * bary[a];
                      });
  return b;
}

SparseMatrix assemble_newton_advection(const Mesh& mesh, std::span<const double> field,
                                       const PsiWeight& kprime) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.num_triangles()) * 9);
  for_each_quad_point(
      mesh, field,
      [&](const ElementGeometry& g, const std::array<double, 3>& bary, double, double,
          double psi, double qw) {
        // grad psi_h is constant on the element; gravity adds e_z.
        double gx = field[g.nodes[0]] * g.grad[0][0] + field[g.nodes[1]] * g.grad[1][0] +
                    field[g.nodes[2]] * g.grad[2][0];
        double gz = field[g.nodes[0]] * g.grad[0][1] + field[g.nodes[1]] * g.grad[1][1] +
                    field[g.nodes[2]] * g.grad[2][1] + 1.0;
        double kq = kprime(psi) * qw;
        for (int a = 0; a < 3; ++a) {
          double test = gx * g.grad[a][0] + gz * g.grad[a][1];
          for (int b = 0; b < 3; ++b)
            trips.push_back({g.nodes[a], g.nodes[b], kq * test * bary[b]});
        }
      });
  return SparseMatrix::from_triplets(mesh.num_nodes(), std::move(trips));
}

DirichletData evaluate_dirichlet(const Mesh& mesh, std::span<const TimeProfile> profiles,
                                 double t) {
  mesh.require_tagged();
  DirichletData d;
  d.is_dirichlet.assign(static_cast<std::size_t>(mesh.num_nodes()), 0);
  d.value.assign(static_cast<std::size_t>(mesh.num_nodes()), 0.0);
  for (const BoundaryEdge& e : mesh.boundary_edges()) {
    if (!e.tag.is_dirichlet()) continue;
    for (int node : {e.a, e.b}) {
      double v;
      if (e.tag.kind == BoundaryTag::Kind::dirichlet_fixed) {
        v = e.tag.value;
      } else {
        if (e.tag.profile < 0 || e.tag.profile >= static_cast<int>(profiles.size()))
          throw std::invalid_argument("evaluate_dirichlet: profile id out of range");
        const Node& p = mesh.nodes()[node];
        v = profiles[e.tag.profile](p.x, p.z, t);
      }
      if (d.is_dirichlet[node]) {
        if (std::abs(d.value[node] - v) > 1e-12 * (1.0 + std::abs(v)))
          throw std::invalid_argument("evaluate_dirichlet: conflicting tags at node " +
                                      std::to_string(node));
      } else {
        d.is_dirichlet[node] = 1;
        d.value[node] = v;
        ++d.count;
      }
    }
  }
  return d;
}

void impose_dirichlet(std::span<double> field, const DirichletData& d) {
  for (std::size_t i = 0; i < field.size(); ++i)
    if (d.is_dirichlet[i]) field[i] = d.value[i];
}

std::vector<double> AssembledSystem::scatter(std::span<const double> x_free) const {
  std::vector<double> full(dirichlet.value.size());
  for (std::size_t node = 0; node < full.size(); ++node)
    full[node] = dirichlet.is_dirichlet[node] ? dirichlet.value[node]
                                              : x_free[node_to_free[node]];
  return full;
}

AssembledSystem apply_dirichlet(const SparseMatrix& a, std::span<const double> b,
                                const Mesh& mesh, const DirichletData& d) {
  int n = mesh.num_nodes();
  if (a.size() != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("apply_dirichlet: size mismatch");

  AssembledSystem sys;
  sys.dirichlet = d;
  sys.node_to_free.assign(static_cast<std::size_t>(n), -1);
  for (int node = 0; node < n; ++node) {
    if (!d.is_dirichlet[node]) {
      sys.node_to_free[node] = static_cast<int>(sys.free_nodes.size());
      sys.free_nodes.push_back(node);
    }
  }

  int nf = static_cast<int>(sys.free_nodes.size());
  sys.rhs.resize(static_cast<std::size_t>(nf));
  std::vector<Triplet> trips;
  trips.reserve(a.nnz());
  auto rp = a.row_offsets();
  auto ci = a.col_indices();
  auto vx = a.values();
  for (int fi = 0; fi < nf; ++fi) {
    int node = sys.free_nodes[fi];
    double rhs = b[node];
    for (int p = rp[node]; p < rp[node + 1]; ++p) {
      int col = ci[p];
      if (d.is_dirichlet[col]) {
        rhs -= vx[p] * d.value[col];  // lifting
      } else {
        trips.push_back({fi, sys.node_to_free[col], vx[p]});
      }
    }
    sys.rhs[fi] = rhs;
  }
  sys.matrix = SparseMatrix::from_triplets(nf, std::move(trips));
  return sys;
}

double max_gradient_norm(const Mesh& mesh, std::span<const double> field) {
  double m = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    double gx = 0.0, gz = 0.0;
    for (int v = 0; v < 3; ++v) {
      gx += field[g.nodes[v]] * g.grad[v][0];
      gz += field[g.nodes[v]] * g.grad[v][1];
    }
    m = std::max(m, std::hypot(gx, gz));
  }
  return m;
}

}  // namespace richards
