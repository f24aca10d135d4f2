#pragma once

#include "dpw/noise.hpp"
#include "dpw/pulse.hpp"

namespace dpw {

// chi = 1/2 integral f_a(t) f_b(t') C(t - t') dt dt' over [0,T]^2 for the
// exponential covariance C(t) = cross_scale * sigma^2 exp(-|t|/tau_c).
// Segment-exact: the inner integrals have closed forms, so no mesh enters.
// Local attenuations use f_a == f_b; cross terms pass the two filters and
// the cross-covariance scale of the correlation model.
double gaussian_attenuation_quadrature(const FilterFunction& filter_a,
                                       const FilterFunction& filter_b,
                                       const OuParams& noise,
                                       double cross_scale = 1.0);

// Scale sigma so the local attenuation of `filter` equals chi_target.
OuParams tune_ou_sigma_for_chi(const FilterFunction& filter, double tau_c,
                               double chi_target);

// 1 + 2 exp(-chi) - exp(-4 chi): the Phi-operator Bell-state expectation for
// perfectly correlated Gaussian noise.
double gaussian_phi_expectation(double chi);

// Maximum of the above, 1 + 3 * 2^(-4/3), reached at chi = ln(2)/3.
double b0_max();
double b0_argmax_chi();

// 2 exp(-chi): the mismatched-operator value, never above 2.
double gaussian_psi_on_phi(double chi);

// Upper end of the chi window where the Gaussian perfect-correlation value
// exceeds the separability threshold 2.
double gaussian_detection_chi_max();

struct RtnCharacteristicParams {
  double v;      // amplitude, rad/s
  int n;         // pulse count
  double gamma;  // switching rate, 1/s
  double tau_p;  // interpulse delay, s
};

// Characteristic function W(v, n, gamma, tau_p) = <cos alpha> of the phase
// accumulated under a Carr-Purcell sequence driven by telegraph noise.
// Evaluated with complex intermediates; regular across v = gamma.
double rtn_characteristic(const RtnCharacteristicParams& p);

// 1 + 2 W(v,...) - W(2v,...): the Phi-operator Bell-state expectation for
// perfectly correlated telegraph noise.
double rtn_chsh_expectation(double v, int n, double gamma, double tau_p);

struct WernerThresholds {
  double p0;              // entanglement boundary, 1/3
  double p_chsh;          // standard CHSH detection threshold, 1/sqrt(2)
  double sigma_chsh;      // (1 - p_chsh) / (1 - p0)
  double p_gaussian;      // 2 / b0_max()
  double sigma_gaussian;  // (1 - p_gaussian) / (1 - p0)
};

WernerThresholds werner_thresholds();

// 2 / B: Werner detection threshold given a Bell-state expectation B; values
// above 1 mean no Werner state is detected.
double werner_threshold_from_B(double B_value);

// Weak-dephasing regime, 0 < chi_curly < 0.2: threshold (1+chi)^-1 and the
// matching sensitivity (~ 3 chi / 2).
double weak_dephasing_threshold(double chi_curly);
double weak_dephasing_sensitivity(double chi_curly);

// Strong-dephasing ceiling at chi_Q = 1: 1 + 2/e - exp(-2) exp(-2 chi_curly),
// always below 2.
double strong_dephasing_bound(double chi_curly);

// NV-center parameterization chi = 2 T^2 g^2 / pi.
double nv_chi(double total_time, double coupling);

}  // namespace dpw
