#pragma once

namespace richards {

/// Van Genuchten-Mualem soil parameters. Units: alpha in 1/m, K_S in m/day,
/// water contents dimensionless.
struct VanGenuchtenParams {
  double theta_R = 0.0;
  double theta_S = 1.0;
  double alpha = 1.0;
  double n = 2.0;
  double K_S = 1.0;

  double m() const { return (n - 1.0) / n; }
  void validate() const;
};

/// Water content theta(psi): theta_S for psi > 0, the van Genuchten curve
/// for psi <= 0. Continuous at zero.
double water_content(const VanGenuchtenParams& p, double psi);

/// Analytic derivative of water_content; zero for psi >= 0.
double dtheta_dpsi(const VanGenuchtenParams& p, double psi);

/// Mualem conductivity in terms of effective saturation
/// S_e = (theta - theta_R)/(theta_S - theta_R), K_S at saturation.
double conductivity(const VanGenuchtenParams& p, double psi);

/// Analytic derivative of conductivity; zero for psi >= 0. Unbounded near
/// zero when n < 2.
double dK_dpsi(const VanGenuchtenParams& p, double psi);

struct LipschitzInfo {
  double L_theta = 0.0;        // global sup of theta'
  double L_K_estimate = 0.0;   // max |K'| on the requested range
  double K_m = 0.0;            // min conductivity on the range
  double K_M = 0.0;            // max conductivity on the range
  bool K_globally_lipschitz = false;  // false when n <= 2 (K' unbounded at 0-)
};

/// Lipschitz data: L_theta by dense scan of [-50, 0] plus golden-section
/// refinement; K extremes and max |K'| restricted to [psi_lo, psi_hi].
LipschitzInfo lipschitz_info(const VanGenuchtenParams& p, double psi_lo, double psi_hi);

}  // namespace richards
