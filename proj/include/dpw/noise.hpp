#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

namespace dpw {

/// Random telegraph noise: +-v with Poisson switching at average rate gamma,
/// gamma = 1/(2 tau_c). Stationary autocovariance v^2 exp(-2 gamma |t|).
struct RtnParams {
  double v;      // amplitude, rad/s
  double gamma;  // switching rate, 1/s
};

/// Stationary Gaussian noise with autocovariance sigma^2 exp(-|t|/tau_c)
/// (Ornstein-Uhlenbeck).
struct OuParams {
  double sigma;  // stationary standard deviation, rad/s
  double tau_c;  // correlation time, s
};

struct CorrelationModel {
  enum class Kind { Perfect, Independent, SharedFraction };
  Kind kind = Kind::Perfect;
  double shared_fraction = 1.0;  // cross-covariance scale c, Gaussian only

  static CorrelationModel perfect() { return {Kind::Perfect, 1.0}; }
  static CorrelationModel independent() { return {Kind::Independent, 0.0}; }
  static CorrelationModel shared(double c);
};

/// One RTN realization, stored as exact switch times so downstream phase
/// integrals carry no discretization error.
struct RtnTrajectory {
  double v;
  int initial_sign;  // +-1
  std::vector<double> switch_times;
  double horizon;

  double value_at(double t) const;
};

/// One OU realization sampled on the uniform grid t_k = k dt.
struct OuTrajectory {
  std::vector<double> samples;
  double dt;
  double horizon;
};

using SiteTrajectory = std::variant<RtnTrajectory, OuTrajectory>;

struct NoiseTrajectoryPair {
  SiteTrajectory site_a;
  SiteTrajectory site_b;
  double horizon;
};

using NoiseKind = std::variant<RtnParams, OuParams>;

RtnTrajectory sample_rtn(const RtnParams& params, double horizon,
                         std::mt19937_64& rng);

// Exact stationary discretization x_{k+1} = a x_k + sigma sqrt(1-a^2) z_k
// with a = exp(-dt/tau_c); requires dt <= tau_c / 20.
OuTrajectory sample_ou(const OuParams& params, double horizon, double dt,
                       std::mt19937_64& rng);

// Perfect duplicates one realization to both sites; Independent draws two;
// SharedFraction(c) mixes a shared and an independent OU component so the
// cross-covariance is c * C(t). SharedFraction is Gaussian-only.
NoiseTrajectoryPair sample_pair(const NoiseKind& kind,
                                const CorrelationModel& corr, double horizon,
                                double dt, std::mt19937_64& rng);

// Lorentzian power density S(omega) = 4 v^2 gamma / (4 gamma^2 + omega^2).
double rtn_spectrum(const RtnParams& params, double omega);

double rtn_covariance(const RtnParams& params, double lag);
double ou_covariance(const OuParams& params, double lag);

// Lorentzian half-width hint used to place "Off" filters: 1/(2 tau_c) for
// OU, gamma for RTN.
double noise_rate_hint(const NoiseKind& kind);

// Counter-based per-trajectory seeding: results do not depend on worker
// count or scheduling.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace dpw
