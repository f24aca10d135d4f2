#include "dpw/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpw {

FilterFunction::FilterFunction(std::vector<double> switch_times,
                               int initial_sign, double duration)
    : switch_times_(std::move(switch_times)),
      initial_sign_(initial_sign),
      duration_(duration) {
  if (initial_sign_ != 1 && initial_sign_ != -1) {
    throw std::invalid_argument("FilterFunction: initial sign must be +-1");
  }
  if (!(duration_ > 0.0)) {
    throw std::invalid_argument("FilterFunction: duration must be positive");
  }
  double prev = 0.0;
  for (double t : switch_times_) {
    if (!(t > prev) || !(t < duration_)) {
      throw std::invalid_argument(
          "FilterFunction: switch times must be strictly ascending inside (0, T)");
    }
    prev = t;
  }
}

int FilterFunction::value_at(double t) const {
  if (!(t >= 0.0 && t <= duration_)) {
    throw std::invalid_argument("FilterFunction: time outside [0, T]");
  }
  const auto it =
      std::upper_bound(switch_times_.begin(), switch_times_.end(), t);
  const auto flips = static_cast<std::size_t>(it - switch_times_.begin());
  return (flips % 2 == 0) ? initial_sign_ : -initial_sign_;
}

double FilterFunction::integral() const {
  double total = 0.0;
  double prev = 0.0;
  int sign = initial_sign_;
  for (double t : switch_times_) {
    total += sign * (t - prev);
    prev = t;
    sign = -sign;
  }
  total += sign * (duration_ - prev);
  return total;
}

std::vector<FilterFunction::Segment> FilterFunction::segments() const {
  std::vector<Segment> out;
  out.reserve(switch_times_.size() + 1);
  double prev = 0.0;
  int sign = initial_sign_;
  for (double t : switch_times_) {
    out.push_back({prev, t, sign});
    prev = t;
    sign = -sign;
  }
  out.push_back({prev, duration_, sign});
  return out;
}

std::optional<int> FilterFunction::carr_purcell_pulse_count() const {
  const auto n = static_cast<int>(switch_times_.size());
  if (n < 1) return std::nullopt;
  const double half = duration_ / (2.0 * n);
  for (int k = 0; k < n; ++k) {
    const double expected = (2.0 * k + 1.0) * half;
    if (std::abs(switch_times_[static_cast<std::size_t>(k)] - expected) >
        1e-9 * duration_) {
      return std::nullopt;
    }
  }
  return n;
}

FilterFunction carr_purcell(int n, double tau_p, bool leading_flip) {
  if (n < 1) {
    throw std::invalid_argument("carr_purcell: n must be >= 1");
  }
  if (!(tau_p > 0.0)) {
    throw std::invalid_argument("carr_purcell: tau_p must be positive");
  }
  const double half = tau_p / 2.0;
  std::vector<double> switches(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    switches[static_cast<std::size_t>(k)] = (2.0 * k + 1.0) * half;
  }
  return FilterFunction(std::move(switches), leading_flip ? -1 : 1,
                        n * tau_p);
}

FilterFunction carr_purcell(const PulseSequence& seq) {
  return carr_purcell(seq.n, seq.tau_p, seq.leading_flip);
}

ControlSetting ControlSetting::off_physical_matched(double duration,
                                                    double gamma_hint) {
  if (!(duration > 0.0)) {
    throw std::invalid_argument("off_physical_matched: duration must be positive");
  }
  if (!(gamma_hint > 0.0)) {
    throw std::invalid_argument("off_physical_matched: gamma hint must be positive");
  }
  // smallest pulse count with omega_p = n pi / T >= 50 * 2 pi gamma
  const double n_min = 2.0 * kOffPassbandMargin * gamma_hint * duration;
  int n = static_cast<int>(std::ceil(n_min - 1e-9));
  if (n < 1) n = 1;
  return off_physical(n * M_PI / duration, n);
}

FilterOrMarker setting_to_filter(const ControlSetting& s, double gamma_hint) {
  switch (s.tag) {
    case SettingTag::OffIdeal:
      return DecoupledMarker{};
    case SettingTag::On:
    case SettingTag::OnStar: {
      if (!(s.omega_p > 0.0)) {
        throw std::invalid_argument("setting_to_filter: omega_p must be positive");
      }
      return carr_purcell(s.n, M_PI / s.omega_p, s.tag == SettingTag::OnStar);
    }
    case SettingTag::OffPhysical: {
      if (!(gamma_hint > 0.0)) {
        throw std::invalid_argument(
            "setting_to_filter: physical Off requires a noise rate hint");
      }
      const double floor = kOffPassbandMargin * 2.0 * M_PI * gamma_hint;
      if (s.omega_p < floor * (1.0 - 1e-9)) {
        throw std::invalid_argument(
            "setting_to_filter: Off passband too close to the noise spectrum");
      }
      return carr_purcell(s.n, M_PI / s.omega_p, false);
    }
  }
  throw std::invalid_argument("setting_to_filter: unknown setting tag");
}

}  // namespace dpw
