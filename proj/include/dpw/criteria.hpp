#pragma once

#include "dpw/mc.hpp"
#include "dpw/two_qubit.hpp"

namespace dpw {

// Phi combines ((Off,Off),(On,Off),(Off,On),-(On,On));
// Psi combines ((Off,Off),(On,Off),(Off,On*),-(On,On*)).
enum class ChshLikeKind { Phi, Psi };

struct Verdict {
  double value = 0.0;
  double threshold = 0.0;
  bool positive = false;
  // (|value| - threshold) / SE for MC inputs; NaN for analytic ones
  double margin_in_std_errors = 0.0;
};

/// The four noise-averaged correlators entering one CHSH-like operator, in
/// the kind's setting order.
struct AveragedCorrelators {
  TwoQubitOperator off_off, on_off, off_on, on_on;
};

// off_off + on_off + off_on - on_on
TwoQubitOperator chsh_like_operator(ChshLikeKind kind,
                                    const AveragedCorrelators& correlators);

// 2*I - B for PhiPlus/PsiPlus, 2*I + B for PhiMinus/PsiMinus; negative
// expectation witnesses entanglement of the matching Bell state.
TwoQubitOperator witness_operator(BellKind kind, const TwoQubitOperator& B);

// |value| > 2 signals entanglement; MC estimates must clear the threshold by
// three standard errors.
Verdict separability_verdict(double value);
Verdict separability_verdict(const McEstimate& estimate);

// Bell-state expectations above b0_max() are impossible for noise with
// Gaussian statistics.
Verdict non_gaussianity_verdict(double value);
Verdict non_gaussianity_verdict(const McEstimate& estimate);

// |Tr B_S rho| against the separable bound 2, with exact expectations.
Verdict standard_chsh_verdict(const DensityMatrix& rho,
                              const ChshSettings& settings);

// ---- assembly helpers ----

/// CHSH-like operator with the scalar coefficient standard errors of its two
/// Pauli components, enough to propagate an SE onto any state expectation.
struct ChshLikeEstimate {
  TwoQubitOperator op;
  double se_plus = 0.0;   // SE of the (E(0,0)+E(pi/2,pi/2))/2 coefficient
  double se_minus = 0.0;  // SE of the (E(0,0)-E(pi/2,pi/2))/2 coefficient
  std::uint64_t n_trajectories = 0;

  McEstimate expectation_on(const DensityMatrix& rho) const;
};

// Full-pipeline MC estimate of the CHSH-like operator: four correlator runs
// with the given On setting (and its On* variant for the Psi kind) against
// the decoupled Off.
ChshLikeEstimate mc_chsh_like_estimate(
    ChshLikeKind kind, const NoiseKind& noise, const CorrelationModel& corr,
    const ControlSetting& on_setting, const McRunConfig& cfg,
    const ControlSetting& off_setting = ControlSetting::off_ideal());

// Closed-form Gaussian counterpart from local attenuations chi_a, chi_b and
// the cross term chi_ab (Cauchy-Schwarz: |chi_ab| <= sqrt(chi_a chi_b)).
TwoQubitOperator gaussian_chsh_like_operator(ChshLikeKind kind, double chi_a,
                                             double chi_b, double chi_ab);

}  // namespace dpw
