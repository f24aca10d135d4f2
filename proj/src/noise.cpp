#include "dpw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpw {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_rtn(const RtnParams& p) {
  if (!(p.v >= 0.0) || !(p.gamma > 0.0)) {
    throw std::invalid_argument("RtnParams: require v >= 0 and gamma > 0");
  }
}

void check_ou(const OuParams& p) {
  if (!(p.sigma >= 0.0) || !(p.tau_c > 0.0)) {
    throw std::invalid_argument("OuParams: require sigma >= 0 and tau_c > 0");
  }
}

}  // namespace

CorrelationModel CorrelationModel::shared(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::invalid_argument("CorrelationModel: shared fraction must lie in [0,1]");
  }
  return {Kind::SharedFraction, c};
}

double RtnTrajectory::value_at(double t) const {
  const auto it =
      std::upper_bound(switch_times.begin(), switch_times.end(), t);
  const auto flips = static_cast<std::size_t>(it - switch_times.begin());
  return (flips % 2 == 0 ? initial_sign : -initial_sign) * v;
}

RtnTrajectory sample_rtn(const RtnParams& params, double horizon,
                         std::mt19937_64& rng) {
  check_rtn(params);
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("sample_rtn: horizon must be positive");
  }
  RtnTrajectory traj;
  traj.v = params.v;
  traj.horizon = horizon;
  traj.initial_sign = (rng() & 1ULL) ? 1 : -1;
  std::exponential_distribution<double> wait(params.gamma);
  double t = wait(rng);
  while (t < horizon) {
    traj.switch_times.push_back(t);
    t += wait(rng);
  }
  return traj;
}

OuTrajectory sample_ou(const OuParams& params, double horizon, double dt,
                       std::mt19937_64& rng) {
  check_ou(params);
  if (!(horizon > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("sample_ou: horizon and dt must be positive");
  }
  if (dt > params.tau_c / 20.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("sample_ou: dt too coarse, require dt <= tau_c/20");
  }
  const auto steps = static_cast<std::size_t>(horizon / dt + 1e-9);
  OuTrajectory traj;
  traj.dt = dt;
  traj.horizon = horizon;
  traj.samples.resize(steps + 1);

  std::normal_distribution<double> gauss(0.0, 1.0);
  const double a = std::exp(-dt / params.tau_c);
  const double q = params.sigma * std::sqrt(1.0 - a * a);
  double x = params.sigma * gauss(rng);
  traj.samples[0] = x;
  for (std::size_t k = 1; k <= steps; ++k) {
    x = a * x + q * gauss(rng);
    traj.samples[k] = x;
  }
  return traj;
}

NoiseTrajectoryPair sample_pair(const NoiseKind& kind,
                                const CorrelationModel& corr, double horizon,
                                double dt, std::mt19937_64& rng) {
  if (const auto* rtn = std::get_if<RtnParams>(&kind)) {
    switch (corr.kind) {
      case CorrelationModel::Kind::Perfect: {
        RtnTrajectory a = sample_rtn(*rtn, horizon, rng);
        return {a, a, horizon};
      }
      case CorrelationModel::Kind::Independent: {
        RtnTrajectory a = sample_rtn(*rtn, horizon, rng);
        RtnTrajectory b = sample_rtn(*rtn, horizon, rng);
        return {std::move(a), std::move(b), horizon};
      }
      case CorrelationModel::Kind::SharedFraction:
        throw std::invalid_argument(
            "sample_pair: partial correlation is not defined for telegraph noise");
    }
  }
  const auto& ou = std::get<OuParams>(kind);
  switch (corr.kind) {
    case CorrelationModel::Kind::Perfect: {
      OuTrajectory a = sample_ou(ou, horizon, dt, rng);
      return {a, a, horizon};
    }
    case CorrelationModel::Kind::Independent: {
      OuTrajectory a = sample_ou(ou, horizon, dt, rng);
      OuTrajectory b = sample_ou(ou, horizon, dt, rng);
      return {std::move(a), std::move(b), horizon};
    }
    case CorrelationModel::Kind::SharedFraction: {
      const double c = corr.shared_fraction;
      const double ws = std::sqrt(c);
      const double wi = std::sqrt(1.0 - c);
      OuTrajectory shared = sample_ou(ou, horizon, dt, rng);
      OuTrajectory a = sample_ou(ou, horizon, dt, rng);
      OuTrajectory b = sample_ou(ou, horizon, dt, rng);
      for (std::size_t k = 0; k < shared.samples.size(); ++k) {
        const double s = ws * shared.samples[k];
        a.samples[k] = s + wi * a.samples[k];
        b.samples[k] = s + wi * b.samples[k];
      }
      return {std::move(a), std::move(b), horizon};
    }
  }
  throw std::invalid_argument("sample_pair: unknown correlation model");
}

double rtn_spectrum(const RtnParams& params, double omega) {
  check_rtn(params);
  return 4.0 * params.v * params.v * params.gamma /
         (4.0 * params.gamma * params.gamma + omega * omega);
}

double rtn_covariance(const RtnParams& params, double lag) {
  return params.v * params.v * std::exp(-2.0 * params.gamma * std::abs(lag));
}

double ou_covariance(const OuParams& params, double lag) {
  return params.sigma * params.sigma * std::exp(-std::abs(lag) / params.tau_c);
}

double noise_rate_hint(const NoiseKind& kind) {
  if (const auto* rtn = std::get_if<RtnParams>(&kind)) {
    return rtn->gamma;
  }
  return 1.0 / (2.0 * std::get<OuParams>(kind).tau_c);
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace dpw
