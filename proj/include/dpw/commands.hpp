#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dpw {

struct Fig2Config {
  double chi_min = 0.0;
  double chi_max = 3.0;
  double chi_step = 0.01;
  int pulses = 2;         // Carr-Purcell pulse count of the On setting
  double omega_p = 3.141592653589793;  // On passband; tau_p = pi / omega_p
  double tau_c = 0.5;     // OU correlation time
};

struct Fig3Config {
  std::vector<double> v_over_gamma = {0.5, 1.0, 2.0, 4.0};
  double omega_min = 0.5;   // passband grid in units of gamma
  double omega_max = 40.0;
  int omega_points = 200;
  std::vector<int> pulse_counts = {2, 4};
  double gamma = 1.0;
};

struct WernerConfig {
  double p_step = 0.001;
  double chi = 0.23104906018664842;  // ln(2)/3, the most sensitive setting
};

struct ValidateConfig {
  std::string suite = "all";  // gaussian | rtn | bounds | all
};

struct RunConfig {
  std::uint64_t seed = 20240817;
  std::uint64_t trajectories = 10000;
  int workers = 0;          // <= 0: hardware concurrency
  std::string out;          // empty: per-command default file name
  bool emit_plot = false;
  Fig2Config fig2;
  Fig3Config fig3;
  WernerConfig werner;
  ValidateConfig validate;
};

// Merge a JSON config file over the defaults; unknown keys are rejected.
RunConfig load_run_config(const std::string& json_text);
void validate_run_config(const RunConfig& cfg);

// FNV-1a over the canonical config serialization, excluding fields that do
// not influence CSV content (workers, out, emit_plot).
std::string config_hash(const RunConfig& cfg);

// Each command writes one CSV (plus an optional plot script) and returns a
// process exit code. Progress notes go to `diag`.
int cmd_fig2(const RunConfig& cfg, std::ostream& diag);
int cmd_fig3(const RunConfig& cfg, std::ostream& diag);
int cmd_werner(const RunConfig& cfg, std::ostream& diag);
int cmd_validate(const RunConfig& cfg, std::ostream& diag);

}  // namespace dpw
