#pragma once

#include <cstdint>

#include "dpw/noise.hpp"
#include "dpw/pulse.hpp"
#include "dpw/two_qubit.hpp"

namespace dpw {

struct PhasePair {
  double alpha;  // accumulated phase on qubit A, rad
  double beta;   // accumulated phase on qubit B, rad
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_trajectories = 0;
  std::uint64_t master_seed = 0;
};

struct ChiEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool saturated = false;  // characteristic mean indistinguishable from 0
};

/// The five attenuation functions for one settings pair. chi_ab is the
/// symmetrized Gaussian cross term (chi_curly - chi_square)/2.
struct AttenuationSet {
  ChiEstimate chi_a, chi_b;
  ChiEstimate chi_curly;   // from the sum phase alpha + beta
  ChiEstimate chi_square;  // from the difference phase alpha - beta
  ChiEstimate chi_ab;
};

struct McRunConfig {
  std::uint64_t n_trajectories = 100000;
  std::uint64_t seed = 0;
  int workers = 0;  // <= 0: hardware concurrency
};

// integral of f(t) xi(t) dt over [0, T]: exact over the merged switch grid
// for telegraph noise, per-segment trapezoid on the sample grid for OU;
// a DecoupledMarker contributes zero phase.
double accumulate_phase(const FilterOrMarker& filter,
                        const SiteTrajectory& trajectory);

/// Expectations of the four Pauli products entering E(alpha, beta); computing
/// them once per state makes the trajectory loop matrix-free.
struct CorrelatorBasis {
  double xx, xy, yx, yy;

  static CorrelatorBasis of(const DensityMatrix& rho);
  double evaluate(const PhasePair& phases) const;
};

// Tr[E(alpha, beta) rho]
double per_trajectory_correlator(const DensityMatrix& rho,
                                 const PhasePair& phases);

/// A (noise, correlation, settings-pair) combination resolved to filters and
/// a sampling grid. Pure value; phases_for is reentrant.
class NoiseExperiment {
 public:
  static NoiseExperiment resolve(NoiseKind kind, CorrelationModel corr,
                                 const ControlSetting& a,
                                 const ControlSetting& b);

  PhasePair phases_for(std::uint64_t trajectory_seed) const;
  double horizon() const { return horizon_; }
  double grid_dt() const { return dt_; }

 private:
  NoiseExperiment() = default;
  NoiseKind kind_{OuParams{0.0, 1.0}};
  CorrelationModel corr_{};
  FilterOrMarker filter_a_{DecoupledMarker{}};
  FilterOrMarker filter_b_{DecoupledMarker{}};
  double horizon_ = 0.0;
  double dt_ = 0.0;
  bool sample_noise_ = false;
};

/// Sample means and standard errors of the per-trajectory observables.
struct PhaseMcResult {
  McEstimate correlator;  // mean of Tr[E(alpha, beta) rho]
  McEstimate cos_alpha, sin_alpha;
  McEstimate cos_beta, sin_beta;
  McEstimate cos_sum, sin_sum;    // of alpha + beta
  McEstimate cos_diff, sin_diff;  // of alpha - beta
};

// One deterministic MC pass producing all phase moments. The reduction is a
// fixed-block sum in trajectory order, so results are bit-identical for any
// worker count.
PhaseMcResult run_phase_mc(const DensityMatrix& rho, const NoiseKind& kind,
                           const CorrelationModel& corr,
                           const ControlSetting& a, const ControlSetting& b,
                           const McRunConfig& cfg);

McEstimate mc_average_correlator(const DensityMatrix& rho,
                                 const NoiseKind& kind,
                                 const CorrelationModel& corr,
                                 const ControlSetting& a,
                                 const ControlSetting& b,
                                 const McRunConfig& cfg);

// chi = -ln<cos(.)> for the local, sum and difference phases; cross terms
// carry the factor-2 exponent convention of the averaged correlator. Throws
// when a <sin(.)> mean is inconsistent with purely real attenuations.
AttenuationSet estimate_attenuations(const NoiseKind& kind,
                                     const CorrelationModel& corr,
                                     const ControlSetting& a,
                                     const ControlSetting& b,
                                     const McRunConfig& cfg);

// exp(-chi_a - chi_b - 2 chi_square) (E(0,0)+E(pi/2,pi/2))/2
//   + exp(-chi_a - chi_b - 2 chi_curly) (E(0,0)-E(pi/2,pi/2))/2;
// requires finite attenuation values.
TwoQubitOperator assemble_avg_correlator(const AttenuationSet& chi);

/// Characteristic-function coefficients of the averaged correlator. Unlike
/// the attenuation route these stay valid in deep decoherence, where the
/// means may reach zero or turn negative.
struct CorrelatorCoefficients {
  McEstimate cos_diff;  // multiplies (E(0,0)+E(pi/2,pi/2))/2
  McEstimate cos_sum;   // multiplies (E(0,0)-E(pi/2,pi/2))/2
};

CorrelatorCoefficients estimate_corr_coefficients(const NoiseKind& kind,
                                                  const CorrelationModel& corr,
                                                  const ControlSetting& a,
                                                  const ControlSetting& b,
                                                  const McRunConfig& cfg);

TwoQubitOperator avg_correlator_from_coefficients(
    const CorrelatorCoefficients& c);

}  // namespace dpw
