#pragma once

#include <array>
#include <vector>

namespace richards {

/// Symmetric quadrature rule on the reference triangle, points in
/// barycentric coordinates, weights normalized to sum to one (so an
/// integral is area * weighted sum).
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  /// Six-point rule exact for bivariate polynomials of total degree <= 4.
  static const QuadratureRule& degree4();
};

}  // namespace richards
