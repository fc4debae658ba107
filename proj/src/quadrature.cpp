#include "richards/quadrature.hpp"

namespace richards {

const QuadratureRule& QuadratureRule::degree4() {
  static const QuadratureRule rule = [] {
    // Dunavant degree-4 rule: two symmetric orbits of three points.
    const double a = 0.445948490915965;
    const double wa = 0.223381589678011;
    const double b = 0.091576213509771;
    const double wb = 0.109951743655322;
    QuadratureRule r;
    for (double c : {a, b}) {
      double w = (c == a) ? wa : wb;
      r.points.push_back({1.0 - 2.0 * c, c, c});
      r.points.push_back({c, 1.0 - 2.0 * c, c});
      r.points.push_back({c, c, 1.0 - 2.0 * c});
      r.weights.insert(r.weights.end(), 3, w);
    }
    return r;
  }();
  return rule;
}

}  // namespace richards
