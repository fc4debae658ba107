#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace richards {

struct Rectangle {
  double x0 = 0.0, x1 = 1.0, z0 = 0.0, z1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return z1 - z0; }
  double area() const { return width() * height(); }
  double diameter() const;

  void validate() const;
};

/// Boundary condition marker attached to a boundary edge. Transient
/// Dirichlet data refers to a profile id resolved by the owning problem.
struct BoundaryTag {
  enum class Kind { untagged, neumann_no_flow, dirichlet_fixed, dirichlet_transient };

  Kind kind = Kind::untagged;
  double value = 0.0;  // dirichlet_fixed
  int profile = -1;    // dirichlet_transient

  static BoundaryTag no_flow() { return {Kind::neumann_no_flow, 0.0, -1}; }
  static BoundaryTag fixed(double v) { return {Kind::dirichlet_fixed, v, -1}; }
  static BoundaryTag transient(int profile_id) {
    return {Kind::dirichlet_transient, 0.0, profile_id};
  }

  bool is_dirichlet() const {
    return kind == Kind::dirichlet_fixed || kind == Kind::dirichlet_transient;
  }
  bool operator==(const BoundaryTag&) const = default;
};

struct Node {
  double x = 0.0, z = 0.0;
};

struct BoundaryEdge {
  int a = -1, b = -1;    // node indices, ordered as in the owning triangle
  int triangle = -1;     // the unique triangle containing this edge
  BoundaryTag tag;

  double midpoint_x(std::span<const Node> nodes) const {
    return 0.5 * (nodes[a].x + nodes[b].x);
  }
  double midpoint_z(std::span<const Node> nodes) const {
    return 0.5 * (nodes[a].z + nodes[b].z);
  }
};

enum class Diagonal { slash, backslash };

/// Structured triangulation of an axis-aligned rectangle. Immutable after
/// construction and tagging; safe to share read-only across threads.
class Mesh {
public:
  Mesh() = default;

  const Rectangle& domain() const { return rect_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const std::array<int, 3>> triangles() const { return triangles_; }
  std::span<const BoundaryEdge> boundary_edges() const { return boundary_edges_; }
  std::vector<BoundaryEdge>& boundary_edges_mutable() { return boundary_edges_; }

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  double spacing_x() const { return hx_; }
  double spacing_z() const { return hz_; }

  double triangle_area(int t) const;

  /// Checks the structural invariants (positive areas, exact tiling,
  /// boundary edges contained in their triangle). Throws on violation.
  void validate() const;

  /// Throws unless every boundary edge carries a real tag.
  void require_tagged() const;

  friend Mesh build_structured(const Rectangle&, int, int, Diagonal);

private:
  Rectangle rect_;
  int nx_ = 0, nz_ = 0;
  double hx_ = 0.0, hz_ = 0.0;
  std::vector<Node> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
};

/// Structured mesh of (nx x nz) cells, two right triangles per cell with
/// counterclockwise node order. Boundary edges come out untagged, emitted
/// bottom, right, top, left, each in ascending coordinate order.
Mesh build_structured(const Rectangle& rect, int nx, int nz,
                      Diagonal diagonal = Diagonal::slash);

using BoundaryRule = std::function<BoundaryTag(double x, double z)>;

/// Applies `rule` at every boundary edge midpoint. The rule must return a
/// real tag (not untagged) everywhere.
Mesh tag_boundary(Mesh mesh, const BoundaryRule& rule);

/// Nodal interpolation of the scalar field g, in mesh node order.
std::vector<double> interpolate_nodal(const Mesh& mesh,
                                      const std::function<double(double, double)>& g);

}  // namespace richards
