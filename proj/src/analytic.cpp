#include "dpw/analytic.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace dpw {

namespace {

using Cx = std::complex<double>;

// second antiderivative of exp(-|u|/tau); even, K2(0) = 0
double k2(double u, double tau) {
  const double au = std::abs(u);
  return tau * au + tau * tau * std::expm1(-au / tau);
}

Cx sinhc(Cx z) {
  if (std::abs(z) < 1e-4) {
    const Cx z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

Cx ipow(Cx base, int e) {
  Cx out{1.0, 0.0};
  while (e > 0) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

}  // namespace

double gaussian_attenuation_quadrature(const FilterFunction& filter_a,
                                       const FilterFunction& filter_b,
                                       const OuParams& noise,
                                       double cross_scale) {
  if (std::abs(filter_a.duration() - filter_b.duration()) >
      1e-9 * std::max(filter_a.duration(), filter_b.duration())) {
    throw std::invalid_argument(
        "gaussian_attenuation_quadrature: filter durations differ");
  }
  if (!(noise.tau_c > 0.0)) {
    throw std::invalid_argument(
        "gaussian_attenuation_quadrature: tau_c must be positive");
  }
  const auto segs_a = filter_a.segments();
  const auto segs_b = filter_b.segments();
  double total = 0.0;
  for (const auto& sa : segs_a) {
    for (const auto& sb : segs_b) {
      const double block = k2(sa.end - sb.start, noise.tau_c) +
                           k2(sa.start - sb.end, noise.tau_c) -
                           k2(sa.start - sb.start, noise.tau_c) -
                           k2(sa.end - sb.end, noise.tau_c);
      total += sa.sign * sb.sign * block;
    }
  }
  return 0.5 * cross_scale * noise.sigma * noise.sigma * total;
}

OuParams tune_ou_sigma_for_chi(const FilterFunction& filter, double tau_c,
                               double chi_target) {
  if (chi_target < 0.0) {
    throw std::invalid_argument("tune_ou_sigma_for_chi: chi must be >= 0");
  }
  const double unit = gaussian_attenuation_quadrature(filter, filter,
                                                      {1.0, tau_c});
  if (!(unit > 0.0)) {
    throw std::runtime_error(
        "tune_ou_sigma_for_chi: filter does not couple to this noise");
  }
  return {std::sqrt(chi_target / unit), tau_c};
}

double gaussian_phi_expectation(double chi) {
  if (!(chi >= 0.0)) {
    throw std::invalid_argument("gaussian_phi_expectation: chi must be >= 0");
  }
  return 1.0 + 2.0 * std::exp(-chi) - std::exp(-4.0 * chi);
}

double b0_max() { return 1.0 + 3.0 * std::pow(2.0, -4.0 / 3.0); }

double b0_argmax_chi() { return std::log(2.0) / 3.0; }

double gaussian_psi_on_phi(double chi) {
  if (!(chi >= 0.0)) {
    throw std::invalid_argument("gaussian_psi_on_phi: chi must be >= 0");
  }
  return 2.0 * std::exp(-chi);
}

double gaussian_detection_chi_max() {
  // bisect 1 + 2 exp(-chi) - exp(-4 chi) = 2 on the decreasing branch
  double lo = b0_argmax_chi(), hi = 3.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gaussian_phi_expectation(mid) > 2.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double rtn_characteristic(const RtnCharacteristicParams& p) {
  if (!(p.v >= 0.0) || p.n < 1 || !(p.gamma > 0.0) || !(p.tau_p > 0.0)) {
    throw std::invalid_argument(
        "rtn_characteristic: require v >= 0, n >= 1, gamma > 0, tau_p > 0");
  }
  // W depends on mu^2 = 1 - (v/gamma)^2 only. Writing everything through
  // sinh(z)/z keeps the v = gamma point regular and avoids cancellation:
  //   ratio  = (cosh z - v^2/g^2) / (mu R) = (u^2 sc^2 / 2 + 1) / Q
  //   l(+-)  = lambda(+-) / mu,  l+ l- = -1
  // with z = u mu, u = gamma tau_p, R = mu Q, Q = sqrt(u^2 snc^2 + 1).
  // The root branch must be shared between ratio and l+: flipping Q swaps
  // the lambda labels and negates ratio together. Aligning sign(Q) with
  // u snc keeps the pair consistent and the sum u snc + Q cancellation
  // free; u snc turns negative once the oscillatory phase gamma|mu|tau_p
  // passes pi.
  const double u = p.gamma * p.tau_p;
  const double ratio_sq = (p.v / p.gamma) * (p.v / p.gamma);
  const Cx mu = std::sqrt(Cx{1.0 - ratio_sq, 0.0});
  const Cx z = u * mu;
  const Cx snc = sinhc(z);
  const Cx sc = sinhc(0.5 * z);
  const Cx us = u * snc;
  Cx q = std::sqrt(us * us + 1.0);
  if (us.real() * q.real() + us.imag() * q.imag() < 0.0) q = -q;
  const Cx ratio = (0.5 * u * u * sc * sc + 1.0) / q;
  const Cx l_big = us + q;
  const Cx l_small = -1.0 / l_big;
  const Cx lp_n = ipow(l_big, p.n);
  const Cx lm_n = ipow(l_small, p.n);
  const Cx w = 0.5 * std::exp(-p.gamma * p.n * p.tau_p) *
               (ratio * (lp_n - lm_n) + lp_n + lm_n);
  if (std::abs(w.imag()) > 1e-10 * std::max(1.0, std::abs(w.real()))) {
    throw std::runtime_error("rtn_characteristic: imaginary residue too large");
  }
  if (std::abs(w.real()) > 1.0 + 1e-9) {
    throw std::runtime_error("rtn_characteristic: |W| exceeds 1");
  }
  return w.real();
}

double rtn_chsh_expectation(double v, int n, double gamma, double tau_p) {
  return 1.0 + 2.0 * rtn_characteristic({v, n, gamma, tau_p}) -
         rtn_characteristic({2.0 * v, n, gamma, tau_p});
}

WernerThresholds werner_thresholds() {
  WernerThresholds t;
  t.p0 = 1.0 / 3.0;
  t.p_chsh = 1.0 / std::sqrt(2.0);
  t.sigma_chsh = (1.0 - t.p_chsh) / (1.0 - t.p0);
  t.p_gaussian = 2.0 / b0_max();
  t.sigma_gaussian = (1.0 - t.p_gaussian) / (1.0 - t.p0);
  return t;
}

double werner_threshold_from_B(double B_value) {
  if (!(B_value > 0.0)) {
    throw std::invalid_argument("werner_threshold_from_B: B must be positive");
  }
  return 2.0 / B_value;
}

double weak_dephasing_threshold(double chi_curly) {
  if (!(chi_curly > 0.0 && chi_curly < 0.2)) {
    throw std::invalid_argument(
        "weak_dephasing_threshold: valid only for 0 < chi << 1 (enforced < 0.2)");
  }
  return 1.0 / (1.0 + chi_curly);
}

double weak_dephasing_sensitivity(double chi_curly) {
  return (1.0 - weak_dephasing_threshold(chi_curly)) / (1.0 - 1.0 / 3.0);
}

double strong_dephasing_bound(double chi_curly) {
  return 1.0 + 2.0 * std::exp(-1.0) -
         std::exp(-2.0) * std::exp(-2.0 * chi_curly);
}

double nv_chi(double total_time, double coupling) {
  if (!(total_time >= 0.0) || !(coupling >= 0.0)) {
    throw std::invalid_argument("nv_chi: require T >= 0 and g >= 0");
  }
  return 2.0 * total_time * total_time * coupling * coupling / M_PI;
}

}  // namespace dpw
