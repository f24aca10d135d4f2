#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dpw/analytic.hpp"
#include "dpw/commands.hpp"

using namespace dpw;

namespace {

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw std::runtime_error("missing column " + name);
  }
  double num(std::size_t row, const std::string& name) const {
    return std::stod(rows[row][static_cast<std::size_t>(col(name))]);
  }
};

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  Csv csv;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.comments.push_back(line);
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!header_seen) {
      csv.header = fields;
      header_seen = true;
    } else {
      csv.rows.push_back(fields);
    }
  }
  return csv;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// first grid value whose flag column turns on
double crossing(const Csv& csv, const std::string& flag_col) {
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    if (csv.num(r, flag_col) > 0.5) return csv.num(r, "p");
  }
  return 2.0;
}

}  // namespace

TEST_CASE("config parsing, overrides and rejection") {
  const RunConfig base = load_run_config("{}");
  CHECK(base.trajectories == 10000);
  CHECK(base.fig2.chi_step == doctest::Approx(0.01));

  const RunConfig cfg = load_run_config(
      R"({"seed": 99, "trajectories": 5000,
          "fig3": {"v_over_gamma": [1.0], "omega_points": 16},
          "werner": {"p_step": 0.01}})");
  CHECK(cfg.seed == 99);
  CHECK(cfg.trajectories == 5000);
  CHECK(cfg.fig3.v_over_gamma == std::vector<double>{1.0});
  CHECK(cfg.fig3.omega_points == 16);
  CHECK(cfg.werner.p_step == doctest::Approx(0.01));
  CHECK(cfg.fig2.chi_max == doctest::Approx(3.0));  // untouched section

  CHECK_THROWS_AS(load_run_config(R"({"sedd": 3})"), std::invalid_argument);
  CHECK_THROWS_AS(load_run_config(R"({"fig2": {"chi_step": -1}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_run_config(R"({"trajectories": 10})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_run_config(R"({"validate": {"suite": "nope"}})"),
                  std::invalid_argument);
}

TEST_CASE("config hash ignores presentation-only fields") {
  RunConfig a;
  RunConfig b = a;
  b.workers = 7;
  b.out = "elsewhere.csv";
  b.emit_plot = true;
  CHECK(config_hash(a) == config_hash(b));

  RunConfig c = a;
  c.seed += 1;
  CHECK(config_hash(a) != config_hash(c));
  RunConfig d = a;
  d.werner.chi = 0.1;
  CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("fig3 command: values, flags and passband ordering") {
  RunConfig cfg;
  cfg.fig3.v_over_gamma = {0.0, 0.5};
  cfg.fig3.omega_points = 60;
  cfg.out = "test_fig3.csv";
  std::ostringstream diag;
  REQUIRE(cmd_fig3(cfg, diag) == 0);

  const Csv csv = read_csv("test_fig3.csv");
  CHECK(csv.rows.size() == 2 * 2 * 60);
  int flagged_n2 = 0, flagged_n4 = 0;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const double ratio = csv.num(r, "v_over_gamma");
    const double value = csv.num(r, "value");
    const int flag = static_cast<int>(csv.num(r, "nongaussian_flag"));
    if (ratio == 0.0) {
      CHECK(value == doctest::Approx(2.0).epsilon(1e-9));
      CHECK(flag == 0);
    } else {
      const int n = static_cast<int>(csv.num(r, "n"));
      CHECK(value ==
            doctest::Approx(rtn_chsh_expectation(
                                0.5, n, 1.0, M_PI / csv.num(r, "omega_p")))
                .epsilon(1e-6));  // columns carry 9 significant digits
      if (flag) (n == 2 ? flagged_n2 : flagged_n4) += 1;
    }
  }
  CHECK(flagged_n2 > 0);          // the window exists
  CHECK(flagged_n4 <= flagged_n2);  // more pulses never widen it
}

TEST_CASE("werner command: all three crossings land on their thresholds") {
  RunConfig cfg;
  cfg.out = "test_werner.csv";
  std::ostringstream diag;
  REQUIRE(cmd_werner(cfg, diag) == 0);

  const Csv csv = read_csv("test_werner.csv");
  REQUIRE(csv.rows.size() == 1001);
  const WernerThresholds t = werner_thresholds();
  CHECK(std::abs(crossing(csv, "ppt_entangled") - t.p0) <= 0.001 + 1e-12);
  CHECK(std::abs(crossing(csv, "chsh_positive") - t.p_chsh) <= 0.001 + 1e-12);
  CHECK(std::abs(crossing(csv, "avg_criterion_positive") - t.p_gaussian) <=
        0.001 + 1e-12);

  // B grows linearly in p up to the Bell value at p = 1
  CHECK(csv.num(1000, "B_value") == doctest::Approx(b0_max()).epsilon(1e-7));
  CHECK(csv.num(500, "B_value") ==
        doctest::Approx(0.5 * b0_max()).epsilon(1e-7));

  bool found_note = false;
  for (const auto& c : csv.comments) {
    if (c.find("13.5%") != std::string::npos) found_note = true;
  }
  CHECK(found_note);
}

TEST_CASE("fig2 command on a coarse grid tracks the analytic curve") {
  RunConfig cfg;
  cfg.fig2.chi_step = 0.25;
  cfg.trajectories = 2000;
  cfg.out = "test_fig2.csv";
  cfg.emit_plot = true;
  std::ostringstream diag;
  REQUIRE(cmd_fig2(cfg, diag) == 0);
  CHECK(bool(std::ifstream("test_fig2.csv.plot.py")));

  const Csv csv = read_csv("test_fig2.csv");
  REQUIRE(csv.rows.size() == 13);
  CHECK(csv.num(0, "chi") == doctest::Approx(0.0));
  CHECK(csv.num(0, "value_analytic") == doctest::Approx(2.0));
  CHECK(csv.num(0, "entangled_flag") == 0.0);
  CHECK(csv.num(12, "value_analytic") ==
        doctest::Approx(1.0995679925).epsilon(1e-6));
  CHECK(csv.num(12, "entangled_flag") == 0.0);

  int flagged = 0;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const double analytic = csv.num(r, "value_analytic");
    CHECK(analytic == doctest::Approx(
                          gaussian_phi_expectation(csv.num(r, "chi")))
                          .epsilon(1e-7));
    const double mc = csv.num(r, "value_mc");
    const double se = csv.num(r, "mc_stderr");
    CHECK(std::abs(mc - analytic) <= 5.0 * se + 1e-9);
    flagged += csv.num(r, "entangled_flag") > 0.5 ? 1 : 0;
  }
  CHECK(flagged == 2);  // chi = 0.25 and chi = 0.5 lie inside the window
}

TEST_CASE("validate command passes and is byte-stable across workers") {
  RunConfig cfg;
  cfg.trajectories = 3000;
  cfg.validate.suite = "gaussian";
  cfg.workers = 1;
  cfg.out = "test_validate_w1.csv";
  std::ostringstream diag;
  REQUIRE(cmd_validate(cfg, diag) == 0);

  cfg.workers = 4;
  cfg.out = "test_validate_w4.csv";
  REQUIRE(cmd_validate(cfg, diag) == 0);

  const std::string w1 = slurp("test_validate_w1.csv");
  const std::string w4 = slurp("test_validate_w4.csv");
  CHECK(!w1.empty());
  CHECK(w1 == w4);

  const Csv csv = read_csv("test_validate_w1.csv");
  CHECK(csv.rows.size() == 12);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    CHECK(csv.rows[r][4] == "1");
  }
}
