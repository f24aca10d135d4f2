#include "dpw/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dpw/analytic.hpp"
#include "dpw/criteria.hpp"
#include "dpw/mc.hpp"
#include "dpw/noise.hpp"
#include "dpw/pulse.hpp"
#include "dpw/two_qubit.hpp"

namespace dpw {

namespace {

using nlohmann::json;

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) {
      throw std::runtime_error("cannot open output file: " + path);
    }
  }

  void comment(const std::string& text) { out_ << "# " << text << "\n"; }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ",";
      out_ << fields[i];
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const char* where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string("config: unknown key '") +
                                  item.key() + "' in " + where);
    }
  }
}

json canonical_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["trajectories"] = c.trajectories;
  j["fig2"] = {{"chi_min", c.fig2.chi_min},     {"chi_max", c.fig2.chi_max},
               {"chi_step", c.fig2.chi_step},   {"pulses", c.fig2.pulses},
               {"omega_p", c.fig2.omega_p},     {"tau_c", c.fig2.tau_c}};
  j["fig3"] = {{"v_over_gamma", c.fig3.v_over_gamma},
               {"omega_min", c.fig3.omega_min},
               {"omega_max", c.fig3.omega_max},
               {"omega_points", c.fig3.omega_points},
               {"pulse_counts", c.fig3.pulse_counts},
               {"gamma", c.fig3.gamma}};
  j["werner"] = {{"p_step", c.werner.p_step}, {"chi", c.werner.chi}};
  j["validate"] = {{"suite", c.validate.suite}};
  return j;
}

std::string default_out(const RunConfig& cfg, const char* name) {
  return cfg.out.empty() ? std::string(name) + ".csv" : cfg.out;
}

void write_plot_script(const RunConfig& cfg, const std::string& csv_path,
                       const std::string& title, const std::string& xlabel,
                       const std::string& body) {
  if (!cfg.emit_plot) return;
  std::ofstream out(csv_path + ".plot.py");
  out << "#!/usr/bin/env python3\n"
      << "import csv\n"
      << "import matplotlib.pyplot as plt\n\n"
      << "rows = []\n"
      << "with open(" << json(csv_path).dump() << ") as fh:\n"
      << "    for rec in csv.reader(r for r in fh if not r.startswith('#')):\n"
      << "        rows.append(rec)\n"
      << "header, rows = rows[0], rows[1:]\n"
      << "col = {name: i for i, name in enumerate(header)}\n"
      << "get = lambda name: [float(r[col[name]]) for r in rows]\n\n"
      << body << "\n"
      << "plt.xlabel(" << json(xlabel).dump() << ")\n"
      << "plt.title(" << json(title).dump() << ")\n"
      << "plt.legend()\n"
      << "plt.savefig(" << json(csv_path + ".png").dump() << ", dpi=160)\n";
}

struct CheckRow {
  std::string name;
  double mc_value;
  double analytic_value;
  double std_error;
  bool pass;
};

// analytic averaged correlator for OU noise from exact quadrature
TwoQubitOperator gaussian_correlator_oracle(const OuParams& noise,
                                            const CorrelationModel& corr,
                                            const ControlSetting& a,
                                            const ControlSetting& b) {
  const double hint = noise_rate_hint(NoiseKind{noise});
  const FilterOrMarker fam = setting_to_filter(a, hint);
  const FilterOrMarker fbm = setting_to_filter(b, hint);
  const auto* fa = std::get_if<FilterFunction>(&fam);
  const auto* fb = std::get_if<FilterFunction>(&fbm);

  double cross_scale = 0.0;
  switch (corr.kind) {
    case CorrelationModel::Kind::Perfect: cross_scale = 1.0; break;
    case CorrelationModel::Kind::Independent: cross_scale = 0.0; break;
    case CorrelationModel::Kind::SharedFraction:
      cross_scale = corr.shared_fraction;
      break;
  }

  AttenuationSet s;
  s.chi_a = {fa ? gaussian_attenuation_quadrature(*fa, *fa, noise) : 0.0, 0.0,
             false};
  s.chi_b = {fb ? gaussian_attenuation_quadrature(*fb, *fb, noise) : 0.0, 0.0,
             false};
  const double chi_ab =
      (fa && fb)
          ? gaussian_attenuation_quadrature(*fa, *fb, noise, cross_scale)
          : 0.0;
  s.chi_curly = {chi_ab, 0.0, false};
  s.chi_square = {-chi_ab, 0.0, false};
  s.chi_ab = {chi_ab, 0.0, false};
  return assemble_avg_correlator(s);
}

std::vector<CheckRow> validate_gaussian(const RunConfig& cfg,
                                        std::uint64_t& subseed) {
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const FilterFunction on_filter = carr_purcell(2, 1.0);
  const OuParams noise =
      tune_ou_sigma_for_chi(on_filter, 0.5, b0_argmax_chi());
  const DensityMatrix rho = bell_state(BellKind::PhiPlus);

  const std::pair<std::string, CorrelationModel> corrs[] = {
      {"perfect", CorrelationModel::perfect()},
      {"independent", CorrelationModel::independent()},
      {"shared0.5", CorrelationModel::shared(0.5)}};
  const std::pair<std::string, std::pair<ControlSetting, ControlSetting>>
      pairs[] = {{"off_off", {ControlSetting::off_ideal(), ControlSetting::off_ideal()}},
                 {"on_off", {on, ControlSetting::off_ideal()}},
                 {"off_on", {ControlSetting::off_ideal(), on}},
                 {"on_on", {on, on}}};

  std::vector<CheckRow> rows;
  for (const auto& [corr_name, corr] : corrs) {
    for (const auto& [pair_name, settings] : pairs) {
      const McRunConfig run{cfg.trajectories,
                            trajectory_seed(cfg.seed, subseed++), cfg.workers};
      const McEstimate mc = mc_average_correlator(
          rho, NoiseKind{noise}, corr, settings.first, settings.second, run);
      const double analytic = expectation(
          gaussian_correlator_oracle(noise, corr, settings.first,
                                     settings.second),
          rho);
      const bool pass =
          std::abs(mc.value - analytic) <= 3.0 * mc.std_error + 1e-12;
      rows.push_back({"gaussian/" + corr_name + "/" + pair_name, mc.value,
                      analytic, mc.std_error, pass});
    }
  }
  return rows;
}

std::vector<CheckRow> validate_rtn(const RunConfig& cfg,
                                   std::uint64_t& subseed) {
  const double gamma = 1.0;
  const DensityMatrix rho = bell_state(BellKind::PhiPlus);
  std::vector<CheckRow> rows;
  for (double ratio : {0.5, 1.0, 2.0, 4.0}) {
    for (int n : {2, 4}) {
      for (double omega : {2.0, 6.0, 20.0}) {
        const double tau_p = M_PI / (omega * gamma);
        const RtnParams noise{ratio * gamma, gamma};
        const McRunConfig run{cfg.trajectories,
                              trajectory_seed(cfg.seed, subseed++),
                              cfg.workers};
        const PhaseMcResult mc = run_phase_mc(
            rho, NoiseKind{noise}, CorrelationModel::perfect(),
            ControlSetting::on(omega * gamma, n), ControlSetting::off_ideal(),
            run);
        const double analytic =
            rtn_characteristic({noise.v, n, gamma, tau_p});
        const bool pass = std::abs(mc.cos_alpha.value - analytic) <=
                          3.0 * mc.cos_alpha.std_error + 1e-12;
        std::ostringstream name;
        name << "rtn/v" << ratio << "/n" << n << "/w" << omega;
        rows.push_back({name.str(), mc.cos_alpha.value, analytic,
                        mc.cos_alpha.std_error, pass});
      }
    }
  }
  return rows;
}

std::vector<CheckRow> validate_bounds(const RunConfig& cfg,
                                      std::uint64_t& subseed) {
  const ControlSetting on = ControlSetting::on(M_PI, 2);
  const FilterFunction on_filter = carr_purcell(2, 1.0);
  const OuParams noise =
      tune_ou_sigma_for_chi(on_filter, 0.5, b0_argmax_chi());

  std::vector<CheckRow> rows;
  for (const auto& [corr_name, corr] :
       {std::pair{std::string("separable"), CorrelationModel::perfect()},
        std::pair{std::string("uncorrelated"),
                  CorrelationModel::independent()}}) {
    for (ChshLikeKind kind : {ChshLikeKind::Phi, ChshLikeKind::Psi}) {
      const McRunConfig run{cfg.trajectories,
                            trajectory_seed(cfg.seed, subseed++), cfg.workers};
      const ChshLikeEstimate B =
          mc_chsh_like_estimate(kind, NoiseKind{noise}, corr, on, run);

      std::mt19937_64 rng(trajectory_seed(cfg.seed, subseed++));
      double worst = 0.0;
      double worst_se = 0.0;
      bool any_positive = false;
      auto consider = [&](const DensityMatrix& rho) {
        const McEstimate e = B.expectation_on(rho);
        if (std::abs(e.value) > worst) {
          worst = std::abs(e.value);
          worst_se = e.std_error;
        }
        any_positive = any_positive || separability_verdict(e).positive;
      };
      if (corr_name == "separable") {
        for (int i = 0; i < 1000; ++i) consider(random_separable_state(rng));
      } else {
        // uncorrelated noise must not flag any state, entangled or not
        for (BellKind bk : {BellKind::PhiPlus, BellKind::PhiMinus,
                            BellKind::PsiPlus, BellKind::PsiMinus}) {
          consider(bell_state(bk));
        }
        for (double p : {0.5, 0.8, 1.0}) consider(werner_state(p));
        for (int i = 0; i < 1000; ++i) consider(random_separable_state(rng));
      }
      const bool pass = !any_positive && worst <= 2.0 + 3.0 * worst_se + 1e-12;
      rows.push_back({"bounds/" + corr_name + "/" +
                          (kind == ChshLikeKind::Phi ? "phi" : "psi"),
                      worst, 2.0, worst_se, pass});
    }
  }
  return rows;
}

}  // namespace

RunConfig load_run_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  reject_unknown(j, {"seed", "trajectories", "workers", "out", "emit_plot",
                     "fig2", "fig3", "werner", "validate"},
                 "top level");
  RunConfig c;
  c.seed = j.value("seed", c.seed);
  c.trajectories = j.value("trajectories", c.trajectories);
  c.workers = j.value("workers", c.workers);
  c.out = j.value("out", c.out);
  c.emit_plot = j.value("emit_plot", c.emit_plot);
  if (j.contains("fig2")) {
    const json& s = j["fig2"];
    reject_unknown(s, {"chi_min", "chi_max", "chi_step", "pulses", "omega_p",
                       "tau_c"},
                   "fig2");
    c.fig2.chi_min = s.value("chi_min", c.fig2.chi_min);
    c.fig2.chi_max = s.value("chi_max", c.fig2.chi_max);
    c.fig2.chi_step = s.value("chi_step", c.fig2.chi_step);
    c.fig2.pulses = s.value("pulses", c.fig2.pulses);
    c.fig2.omega_p = s.value("omega_p", c.fig2.omega_p);
    c.fig2.tau_c = s.value("tau_c", c.fig2.tau_c);
  }
  if (j.contains("fig3")) {
    const json& s = j["fig3"];
    reject_unknown(s, {"v_over_gamma", "omega_min", "omega_max",
                       "omega_points", "pulse_counts", "gamma"},
                   "fig3");
    c.fig3.v_over_gamma =
        s.value("v_over_gamma", c.fig3.v_over_gamma);
    c.fig3.omega_min = s.value("omega_min", c.fig3.omega_min);
    c.fig3.omega_max = s.value("omega_max", c.fig3.omega_max);
    c.fig3.omega_points = s.value("omega_points", c.fig3.omega_points);
    c.fig3.pulse_counts = s.value("pulse_counts", c.fig3.pulse_counts);
    c.fig3.gamma = s.value("gamma", c.fig3.gamma);
  }
  if (j.contains("werner")) {
    const json& s = j["werner"];
    reject_unknown(s, {"p_step", "chi"}, "werner");
    c.werner.p_step = s.value("p_step", c.werner.p_step);
    c.werner.chi = s.value("chi", c.werner.chi);
  }
  if (j.contains("validate")) {
    const json& s = j["validate"];
    reject_unknown(s, {"suite"}, "validate");
    c.validate.suite = s.value("suite", c.validate.suite);
  }
  validate_run_config(c);
  return c;
}

void validate_run_config(const RunConfig& c) {
  auto fail = [](const char* msg) { throw std::invalid_argument(msg); };
  if (c.trajectories < 1000) fail("config: trajectories must be >= 1000");
  if (!(c.fig2.chi_min >= 0.0) || !(c.fig2.chi_max > c.fig2.chi_min) ||
      !(c.fig2.chi_step > 0.0)) {
    fail("config: fig2 chi grid must be positive and ascending");
  }
  if (c.fig2.pulses < 1 || !(c.fig2.omega_p > 0.0) || !(c.fig2.tau_c > 0.0)) {
    fail("config: fig2 physical parameters must be positive");
  }
  if (c.fig3.v_over_gamma.empty() || c.fig3.pulse_counts.empty()) {
    fail("config: fig3 grids must be non-empty");
  }
  for (double r : c.fig3.v_over_gamma) {
    if (!(r >= 0.0)) fail("config: fig3 amplitude ratios must be >= 0");
  }
  for (int n : c.fig3.pulse_counts) {
    if (n < 1) fail("config: fig3 pulse counts must be >= 1");
  }
  if (!(c.fig3.omega_min > 0.0) || !(c.fig3.omega_max > c.fig3.omega_min) ||
      c.fig3.omega_points < 2 || !(c.fig3.gamma > 0.0)) {
    fail("config: fig3 passband grid must be positive and ascending");
  }
  if (!(c.werner.p_step > 0.0 && c.werner.p_step <= 0.5) ||
      !(c.werner.chi >= 0.0)) {
    fail("config: werner parameters out of range");
  }
  if (c.validate.suite != "gaussian" && c.validate.suite != "rtn" &&
      c.validate.suite != "bounds" && c.validate.suite != "all") {
    fail("config: validate suite must be gaussian, rtn, bounds or all");
  }
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = canonical_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

int cmd_fig2(const RunConfig& cfg, std::ostream& diag) {
  validate_run_config(cfg);
  if (!(cfg.fig2.chi_max <= 3.0)) {
    throw std::invalid_argument("cmd_fig2: chi grid must stay within [0, 3]");
  }
  const std::string path = default_out(cfg, "fig2");
  CsvWriter csv(path);
  csv.comment("config " + config_hash(cfg) + " seed " +
              std::to_string(cfg.seed));
  csv.row({"chi", "value_analytic", "value_mc", "mc_stderr", "entangled_flag"});

  const ControlSetting on =
      ControlSetting::on(cfg.fig2.omega_p, cfg.fig2.pulses);
  const FilterFunction on_filter =
      carr_purcell(cfg.fig2.pulses, M_PI / cfg.fig2.omega_p);
  const double chi_unit =
      gaussian_attenuation_quadrature(on_filter, on_filter, {1.0, cfg.fig2.tau_c});
  const DensityMatrix phi = bell_state(BellKind::PhiPlus);

  const int npts = static_cast<int>(
      std::round((cfg.fig2.chi_max - cfg.fig2.chi_min) / cfg.fig2.chi_step)) + 1;
  for (int i = 0; i < npts; ++i) {
    const double chi = cfg.fig2.chi_min + i * cfg.fig2.chi_step;
    const double analytic = gaussian_phi_expectation(chi);
    const OuParams noise{std::sqrt(chi / chi_unit), cfg.fig2.tau_c};
    const McRunConfig run{cfg.trajectories,
                          trajectory_seed(cfg.seed, 0xF1620000ULL + i),
                          cfg.workers};
    const ChshLikeEstimate B = mc_chsh_like_estimate(
        ChshLikeKind::Phi, NoiseKind{noise}, CorrelationModel::perfect(), on,
        run);
    const McEstimate mc = B.expectation_on(phi);
    csv.row({fmt_real(chi), fmt_real(analytic), fmt_real(std::abs(mc.value)),
             fmt_real(mc.std_error), analytic > 2.0 ? "1" : "0"});
  }
  write_plot_script(cfg, path, "Gaussian criterion vs attenuation", "chi",
                    "plt.plot(get('chi'), get('value_analytic'), label='analytic')\n"
                    "plt.errorbar(get('chi'), get('value_mc'),\n"
                    "             yerr=[3*s for s in get('mc_stderr')],\n"
                    "             fmt='.', ms=2, label='MC (3 s.e.)')\n"
                    "plt.axhline(2.0, color='r', ls='--', lw=0.8)\n");
  diag << "fig2: wrote " << npts << " rows to " << path << "\n";
  return 0;
}

int cmd_fig3(const RunConfig& cfg, std::ostream& diag) {
  validate_run_config(cfg);
  const std::string path = default_out(cfg, "fig3");
  CsvWriter csv(path);
  csv.comment("config " + config_hash(cfg) + " seed " +
              std::to_string(cfg.seed));
  csv.comment("threshold " + fmt_real(b0_max()));
  csv.row({"v_over_gamma", "n", "omega_p", "value", "nongaussian_flag"});

  const double gamma = cfg.fig3.gamma;
  const double log_lo = std::log(cfg.fig3.omega_min);
  const double log_hi = std::log(cfg.fig3.omega_max);
  int rows = 0;
  for (double ratio : cfg.fig3.v_over_gamma) {
    for (int n : cfg.fig3.pulse_counts) {
      for (int k = 0; k < cfg.fig3.omega_points; ++k) {
        const double omega =
            gamma * std::exp(log_lo + (log_hi - log_lo) * k /
                                          (cfg.fig3.omega_points - 1));
        const double value =
            rtn_chsh_expectation(ratio * gamma, n, gamma, M_PI / omega);
        csv.row({fmt_real(ratio), std::to_string(n), fmt_real(omega),
                 fmt_real(value),
                 std::abs(value) > b0_max() ? "1" : "0"});
        ++rows;
      }
    }
  }
  write_plot_script(cfg, path, "Telegraph-noise criterion vs passband",
                    "omega_p",
                    "import itertools\n"
                    "keys = sorted(set(zip(get('v_over_gamma'), get('n'))))\n"
                    "for v, n in keys:\n"
                    "    pts = [(w, y) for w, y, vv, nn in zip(get('omega_p'),"
                    " get('value'), get('v_over_gamma'), get('n'))"
                    " if (vv, nn) == (v, n)]\n"
                    "    plt.semilogx([p[0] for p in pts], [p[1] for p in pts],"
                    " label=f'v/g={v}, n={int(n)}')\n"
                    "plt.axhline(2.1905508, color='r', ls='--', lw=0.8)\n");
  diag << "fig3: wrote " << rows << " rows to " << path << "\n";
  return 0;
}

int cmd_werner(const RunConfig& cfg, std::ostream& diag) {
  validate_run_config(cfg);
  const std::string path = default_out(cfg, "werner");
  CsvWriter csv(path);
  csv.comment("config " + config_hash(cfg) + " seed " +
              std::to_string(cfg.seed));

  const TwoQubitOperator B_psi = gaussian_chsh_like_operator(
      ChshLikeKind::Psi, cfg.werner.chi, cfg.werner.chi, cfg.werner.chi);
  const double bell_value =
      std::abs(expectation(B_psi, bell_state(BellKind::PsiMinus)));
  const WernerThresholds t = werner_thresholds();

  csv.comment("bell_value " + fmt_real(bell_value) + " predicted_crossing " +
              fmt_real(werner_threshold_from_B(bell_value)));
  csv.comment("p0 " + fmt_real(t.p0) + " p_chsh " + fmt_real(t.p_chsh) +
              " p_gaussian " + fmt_real(t.p_gaussian));
  csv.comment("sigma_chsh " + fmt_real(t.sigma_chsh) + " sigma_gaussian " +
              fmt_real(t.sigma_gaussian));
  csv.comment("sigma_gaussian follows (1-p_gaussian)/(1-p0) = 0.1305; a"
              " commonly quoted 13.5% does not match the formula");
  csv.row({"p", "ppt_entangled", "chsh_positive", "avg_criterion_positive",
           "B_value"});

  const ChshSettings settings = optimal_chsh_settings(BellKind::PsiMinus);
  const int npts = static_cast<int>(std::round(1.0 / cfg.werner.p_step)) + 1;
  for (int i = 0; i < npts; ++i) {
    const double p = std::min(1.0, i * cfg.werner.p_step);
    const DensityMatrix rho = werner_state(p);
    const bool ppt = ppt_is_entangled(rho);
    const bool chsh = standard_chsh_verdict(rho, settings).positive;
    const double value = std::abs(expectation(B_psi, rho));
    const bool avg = separability_verdict(value).positive;
    csv.row({fmt_real(p), ppt ? "1" : "0", chsh ? "1" : "0", avg ? "1" : "0",
             fmt_real(value)});
  }
  write_plot_script(cfg, path, "Werner-state detection thresholds", "p",
                    "plt.plot(get('p'), get('B_value'), label='|Tr B rho_p|')\n"
                    "plt.plot(get('p'), get('ppt_entangled'), label='PPT')\n"
                    "plt.plot(get('p'), get('chsh_positive'), label='CHSH')\n"
                    "plt.plot(get('p'), get('avg_criterion_positive'),"
                    " label='averaged criterion')\n"
                    "plt.axhline(2.0, color='r', ls='--', lw=0.8)\n");
  diag << "werner: wrote " << npts << " rows to " << path << "\n";
  return 0;
}

int cmd_validate(const RunConfig& cfg, std::ostream& diag) {
  validate_run_config(cfg);
  const std::string path = default_out(cfg, "validate");
  CsvWriter csv(path);
  csv.comment("config " + config_hash(cfg) + " seed " +
              std::to_string(cfg.seed));
  csv.row({"name", "mc_value", "analytic_value", "stderr", "pass"});

  std::uint64_t subseed = 0xA11CE000ULL;
  std::vector<CheckRow> rows;
  const std::string& suite = cfg.validate.suite;
  if (suite == "gaussian" || suite == "all") {
    auto r = validate_gaussian(cfg, subseed);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  if (suite == "rtn" || suite == "all") {
    auto r = validate_rtn(cfg, subseed);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  if (suite == "bounds" || suite == "all") {
    auto r = validate_bounds(cfg, subseed);
    rows.insert(rows.end(), r.begin(), r.end());
  }

  int failures = 0;
  for (const auto& r : rows) {
    csv.row({r.name, fmt_real(r.mc_value), fmt_real(r.analytic_value),
             fmt_real(r.std_error), r.pass ? "1" : "0"});
    if (!r.pass) ++failures;
  }
  diag << "validate: " << rows.size() - failures << "/" << rows.size()
       << " checks passed, wrote " << path << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace dpw
