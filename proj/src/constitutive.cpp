#include "richards/constitutive.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace richards {

void VanGenuchtenParams::validate() const {
  if (!(theta_R >= 0.0 && theta_R < theta_S && theta_S <= 1.0))
    throw std::invalid_argument("VanGenuchtenParams: need 0 <= theta_R < theta_S <= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("VanGenuchtenParams: alpha must be > 0");
  if (!(n > 1.0)) throw std::invalid_argument("VanGenuchtenParams: n must be > 1");
  if (!(K_S > 0.0)) throw std::invalid_argument("VanGenuchtenParams: K_S must be > 0");
}

namespace {

// Effective saturation S_e = (1 + (-alpha psi)^n)^(-m), psi <= 0.
double effective_saturation(const VanGenuchtenParams& p, double psi) {
  double u = std::pow(-p.alpha * psi, p.n);
  return std::exp(-p.m() * std::log1p(u));
}

}  // namespace

double water_content(const VanGenuchtenParams& p, double psi) {
  if (psi > 0.0) return p.theta_S;
  return p.theta_R + (p.theta_S - p.theta_R) * effective_saturation(p, psi);
}

double dtheta_dpsi(const VanGenuchtenParams& p, double psi) {
  if (psi >= 0.0) return 0.0;
  double m = p.m();
  double x = -p.alpha * psi;
  double u = std::pow(x, p.n);
  return (p.theta_S - p.theta_R) * p.alpha * m * p.n * std::pow(x, p.n - 1.0) *
         std::exp(-(m + 1.0) * std::log1p(u));
}

double conductivity(const VanGenuchtenParams& p, double psi) {
  if (psi > 0.0) return p.K_S;
  double m = p.m();
  double se = effective_saturation(p, psi);
  // 1 - S_e^(1/m) = u/(1+u) exactly, avoiding cancellation near saturation.
  double u = std::pow(-p.alpha * psi, p.n);
  double w = u / (1.0 + u);
  double bracket = (w > 0.0) ? -std::expm1(m * std::log(w)) : 1.0;
  return p.K_S * std::sqrt(se) * bracket * bracket;
}

double dK_dpsi(const VanGenuchtenParams& p, double psi) {
  if (psi >= 0.0) return 0.0;
  double m = p.m();
  double x = -p.alpha * psi;
  double u = std::pow(x, p.n);
  double se = effective_saturation(p, psi);
  double w = u / (1.0 + u);
  double bracket = (w > 0.0) ? -std::expm1(m * std::log(w)) : 1.0;
  // dK/dpsi = K_S a m n (1+u)^(-m-1) [ x^(n-1) B^2 / (2 sqrt(S)) + 2 sqrt(S) B x^(n-2) ]
  double common = p.K_S * p.alpha * m * p.n * std::exp(-(m + 1.0) * std::log1p(u));
  double term1 = std::pow(x, p.n - 1.0) * bracket * bracket / (2.0 * std::sqrt(se));
  double term2 = 2.0 * std::sqrt(se) * bracket * std::pow(x, p.n - 2.0);
  return common * (term1 + term2);
}

namespace {

// Golden-section maximization on [lo, hi] for a unimodal objective.
double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max(f(0.5 * (a + b)), std::max(fc, fd));
}

// Dense scan plus local golden-section refinement around the best sample.
double scan_max(const std::function<double(double)>& f, double lo, double hi, int samples) {
  double best = f(lo);
  int best_i = 0;
  double step = (hi - lo) / samples;
  for (int i = 1; i <= samples; ++i) {
    double v = f(lo + i * step);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double a = lo + std::max(0, best_i - 1) * step;
  double b = lo + std::min(samples, best_i + 1) * step;
  return std::max(best, golden_max(f, a, b));
}

}  // namespace

LipschitzInfo lipschitz_info(const VanGenuchtenParams& p, double psi_lo, double psi_hi) {
  p.validate();
  if (!(psi_lo < psi_hi)) throw std::invalid_argument("lipschitz_info: empty range");

  LipschitzInfo info;
  info.L_theta = scan_max([&](double psi) { return dtheta_dpsi(p, psi); }, -50.0, 0.0, 10000);
  info.K_globally_lipschitz = p.n > 2.0;

  const int samples = 10000;
  double k_min = conductivity(p, psi_lo), k_max = k_min, dk_max = std::abs(dK_dpsi(p, psi_lo));
  double step = (psi_hi - psi_lo) / samples;
  for (int i = 1; i <= samples; ++i) {
    double psi = psi_lo + i * step;
    double k = conductivity(p, psi);
    k_min = std::min(k_min, k);
    k_max = std::max(k_max, k);
    dk_max = std::max(dk_max, std::abs(dK_dpsi(p, psi)));
  }
  info.K_m = k_min;
  info.K_M = k_max;
  // |K'| is unimodal on the unsaturated side for n > 2; the scan maximum is
  // refined locally either way.
  info.L_K_estimate =
      scan_max([&](double psi) { return std::abs(dK_dpsi(p, psi)); }, psi_lo,
               std::min(psi_hi, -1e-12), samples);
  return info;
}

}  // namespace richards
