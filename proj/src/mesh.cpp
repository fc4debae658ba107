#include "richards/mesh.hpp"

#include <cmath>
#include <string>

namespace richards {

double Rectangle::diameter() const { return std::hypot(width(), height()); }

void Rectangle::validate() const {
  if (!(x1 > x0) || !(z1 > z0))
    throw std::invalid_argument("Rectangle: extents must be positive");
}

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles_[static_cast<std::size_t>(t)];
  const Node& p0 = nodes_[tri[0]];
  const Node& p1 = nodes_[tri[1]];
  const Node& p2 = nodes_[tri[2]];
  return 0.5 * ((p1.x - p0.x) * (p2.z - p0.z) - (p2.x - p0.x) * (p1.z - p0.z));
}

void Mesh::validate() const {
  double total = 0.0;
  for (int t = 0; t < num_triangles(); ++t) {
    double area = triangle_area(t);
    if (!(area > 0.0))
      throw std::logic_error("Mesh: non-positive triangle area at " + std::to_string(t));
    total += area;
  }
  double ref = rect_.area();
  if (std::abs(total - ref) > 1e-12 * ref)
    throw std::logic_error("Mesh: triangles do not tile the rectangle");
  if (static_cast<int>(boundary_edges_.size()) != 2 * (nx_ + nz_))
    throw std::logic_error("Mesh: unexpected boundary edge count");
  for (const BoundaryEdge& e : boundary_edges_) {
    const auto& tri = triangles_[static_cast<std::size_t>(e.triangle)];
    bool has_a = tri[0] == e.a || tri[1] == e.a || tri[2] == e.a;
    bool has_b = tri[0] == e.b || tri[1] == e.b || tri[2] == e.b;
    if (!has_a || !has_b)
      throw std::logic_error("Mesh: boundary edge not contained in its triangle");
  }
}

void Mesh::require_tagged() const {
  for (const BoundaryEdge& e : boundary_edges_)
    if (e.tag.kind == BoundaryTag::Kind::untagged)
      throw std::logic_error("Mesh: boundary edge without tag");
}

Mesh build_structured(const Rectangle& rect, int nx, int nz, Diagonal diagonal) {
  rect.validate();
  if (nx < 1 || nz < 1) throw std::invalid_argument("build_structured: nx, nz must be >= 1");

  Mesh m;
  m.rect_ = rect;
  m.nx_ = nx;
  m.nz_ = nz;
  m.hx_ = rect.width() / nx;
  m.hz_ = rect.height() / nz;

  auto node_id = [nx](int i, int j) { return j * (nx + 1) + i; };

  m.nodes_.reserve(static_cast<std::size_t>((nx + 1) * (nz + 1)));
  for (int j = 0; j <= nz; ++j) {
    double z = (j == nz) ? rect.z1 : rect.z0 + j * m.hz_;
    for (int i = 0; i <= nx; ++i) {
      double x = (i == nx) ? rect.x1 : rect.x0 + i * m.hx_;
      m.nodes_.push_back({x, z});
    }
  }

  m.triangles_.reserve(static_cast<std::size_t>(2 * nx * nz));
  for (int j = 0; j < nz; ++j) {
    for (int i = 0; i < nx; ++i) {
      int n00 = node_id(i, j), n10 = node_id(i + 1, j);
      int n01 = node_id(i, j + 1), n11 = node_id(i + 1, j + 1);
      if (diagonal == Diagonal::slash) {
        m.triangles_.push_back({n00, n10, n11});
        m.triangles_.push_back({n00, n11, n01});
      } else {
        m.triangles_.push_back({n00, n10, n01});
        m.triangles_.push_back({n10, n11, n01});
      }
    }
  }

  auto cell_tri = [nx](int i, int j, int which) { return 2 * (j * nx + i) + which; };
  const bool slash = diagonal == Diagonal::slash;
  m.boundary_edges_.reserve(static_cast<std::size_t>(2 * (nx + nz)));
  for (int i = 0; i < nx; ++i)  // bottom
    m.boundary_edges_.push_back({node_id(i, 0), node_id(i + 1, 0), cell_tri(i, 0, 0), {}});
  for (int j = 0; j < nz; ++j)  // right
    m.boundary_edges_.push_back(
        {node_id(nx, j), node_id(nx, j + 1), cell_tri(nx - 1, j, slash ? 0 : 1), {}});
  for (int i = 0; i < nx; ++i)  // top
    m.boundary_edges_.push_back(
        {node_id(i + 1, nz), node_id(i, nz), cell_tri(i, nz - 1, 1), {}});
  for (int j = 0; j < nz; ++j)  // left
    m.boundary_edges_.push_back(
        {node_id(0, j + 1), node_id(0, j), cell_tri(0, j, slash ? 1 : 0), {}});

  return m;
}

Mesh tag_boundary(Mesh mesh, const BoundaryRule& rule) {
  for (BoundaryEdge& e : mesh.boundary_edges_mutable()) {
    BoundaryTag tag = rule(e.midpoint_x(mesh.nodes()), e.midpoint_z(mesh.nodes()));
    if (tag.kind == BoundaryTag::Kind::untagged)
      throw std::invalid_argument("tag_boundary: rule returned no tag for a boundary edge");
    e.tag = tag;
  }
  return mesh;
}

std::vector<double> interpolate_nodal(const Mesh& mesh,
                                      const std::function<double(double, double)>& g) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(mesh.num_nodes()));
  for (const Node& n : mesh.nodes()) v.push_back(g(n.x, n.z));
  return v;
}

}  // namespace richards
