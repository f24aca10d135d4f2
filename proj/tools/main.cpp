#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dpw/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read config file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qubit dephasing witness: correlated-noise CHSH-like "
               "separability and non-Gaussianity criteria"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::uint64_t trajectories = 0;
  int workers = -1;
  std::string out;
  bool emit_plot = false;
  std::string suite;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--seed", seed, "master RNG seed");
    cmd->add_option("--trajectories", trajectories,
                    "Monte Carlo trajectories per estimate");
    cmd->add_option("--workers", workers,
                    "worker threads (results do not depend on this)");
    cmd->add_option("--out", out, "output CSV path");
    cmd->add_flag("--emit-plot", emit_plot,
                  "also write a matplotlib script next to the CSV");
  };

  CLI::App* fig2 = app.add_subcommand(
      "fig2", "Gaussian-noise criterion vs attenuation, analytic and MC");
  CLI::App* fig3 = app.add_subcommand(
      "fig3", "telegraph-noise criterion vs filter passband");
  CLI::App* werner = app.add_subcommand(
      "werner", "detection thresholds across the Werner family");
  CLI::App* validate = app.add_subcommand(
      "validate", "MC vs closed-form self checks; nonzero exit on failure");
  for (CLI::App* cmd : {fig2, fig3, werner, validate}) add_common(cmd);
  validate->add_option("--suite", suite, "gaussian | rtn | bounds | all");

  CLI11_PARSE(app, argc, argv);

  try {
    dpw::RunConfig cfg = config_path.empty()
                             ? dpw::RunConfig{}
                             : dpw::load_run_config(read_file(config_path));
    auto passed = [&](const char* name, const CLI::App* cmd) {
      return cmd->count(name) > 0;
    };
    const CLI::App* active = app.get_subcommands().front();
    if (passed("--seed", active)) cfg.seed = seed;
    if (passed("--trajectories", active)) cfg.trajectories = trajectories;
    if (passed("--workers", active)) cfg.workers = workers;
    if (passed("--out", active)) cfg.out = out;
    if (passed("--emit-plot", active)) cfg.emit_plot = emit_plot;
    if (active == validate && passed("--suite", active)) {
      cfg.validate.suite = suite;
    }

    if (active == fig2) return dpw::cmd_fig2(cfg, std::cout);
    if (active == fig3) return dpw::cmd_fig3(cfg, std::cout);
    if (active == werner) return dpw::cmd_werner(cfg, std::cout);
    return dpw::cmd_validate(cfg, std::cout);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
