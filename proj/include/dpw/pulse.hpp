#pragma once

#include <optional>
#include <variant>
#include <vector>

namespace dpw {

struct PulseSequence {
  int n;             // pulse count, >= 1
  double tau_p;      // interpulse delay, > 0
  bool leading_flip; // extra pi pulse at t = 0 ("On*" variant)
};

/// Piecewise-constant +-1 square wave on [0, T] with flips at the switch
/// times. Right-continuous at switches.
class FilterFunction {
 public:
  FilterFunction(std::vector<double> switch_times, int initial_sign,
                 double duration);

  struct Segment {
    double start, end;
    int sign;
  };

  int value_at(double t) const;      // +-1; throws outside [0, T]
  double integral() const;           // segment-exact integral of f
  double duration() const { return duration_; }
  int initial_sign() const { return initial_sign_; }
  const std::vector<double>& switch_times() const { return switch_times_; }
  std::vector<Segment> segments() const;

  // Pulse count when the switch times follow the Carr-Purcell pattern
  // (2k-1) T / (2n); nullopt for irregular filters.
  std::optional<int> carr_purcell_pulse_count() const;

 private:
  std::vector<double> switch_times_;
  int initial_sign_;
  double duration_;
};

// Switches at tau_p/2, 3 tau_p/2, ..., (2n-1) tau_p/2; duration n tau_p.
// leading_flip negates the whole wave.
FilterFunction carr_purcell(int n, double tau_p, bool leading_flip = false);
FilterFunction carr_purcell(const PulseSequence& seq);

/// Stands in for a filter when the qubit is ideally decoupled: the
/// accumulated phase is identically zero.
struct DecoupledMarker {};

using FilterOrMarker = std::variant<FilterFunction, DecoupledMarker>;

enum class SettingTag { OffIdeal, OffPhysical, On, OnStar };

struct ControlSetting {
  SettingTag tag = SettingTag::OffIdeal;
  double omega_p = 0.0;  // filter passband center, pi / tau_p
  int n = 0;             // pulse count

  static ControlSetting off_ideal() { return {SettingTag::OffIdeal, 0.0, 0}; }
  static ControlSetting off_physical(double omega_p, int n) {
    return {SettingTag::OffPhysical, omega_p, n};
  }
  static ControlSetting on(double omega_p, int n) {
    return {SettingTag::On, omega_p, n};
  }
  static ControlSetting on_star(double omega_p, int n) {
    return {SettingTag::OnStar, omega_p, n};
  }

  // Physical Off sequence of the given total duration whose passband sits
  // at least 50 Lorentzian widths (2 pi gamma) above zero frequency.
  static ControlSetting off_physical_matched(double duration,
                                             double gamma_hint);
};

// Passband margin of the physical Off setting relative to the Lorentzian
// half-width 2 pi gamma.
inline constexpr double kOffPassbandMargin = 50.0;

// On/OnStar -> Carr-Purcell filter with tau_p = pi/omega_p; OffIdeal ->
// DecoupledMarker; OffPhysical -> Carr-Purcell, requires gamma_hint > 0 and
// omega_p >= 50 * (2 pi gamma_hint).
FilterOrMarker setting_to_filter(const ControlSetting& s,
                                 double gamma_hint = 0.0);

}  // namespace dpw
