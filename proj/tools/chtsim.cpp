#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "cht/config.hpp"
#include "cht/errors.hpp"
#include "cht/orchestrate.hpp"

namespace {

// Loads the config or reports why not; returns the exit code on failure.
int load(const std::string& path, cht::ParsedConfig& out) {
  try {
    out = cht::load_config(path);
    return cht::kExitOk;
  } catch (const cht::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cht::kExitIo;
  } catch (const cht::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cht::kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chtsim: chemotaxis-haptotaxis finite-volume simulator and invariant checker"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<double> values;
  unsigned workers = cht::workers_from_env();

  auto* run = app.add_subcommand("run", "Run one simulation and check its invariants");
  run->add_option("config", config_path, "INI config file")->required();

  auto* sweep_m = app.add_subcommand("sweep-m", "Run the base config for several diffusion exponents m");
  sweep_m->add_option("config", config_path, "INI config file")->required();
  sweep_m->add_option("--values", values, "Values of m (at least two)")->required()->delimiter(',');
  sweep_m->add_option("--workers", workers, "Parallel members (0 = all cores; default from CHTSIM_WORKERS)");

  auto* sweep_eps = app.add_subcommand("sweep-eps", "Regularization sweep D(s + eps) with a Cauchy check");
  sweep_eps->add_option("config", config_path, "INI config file")->required();
  sweep_eps->add_option("--values", values, "Nonincreasing epsilons (at least three)")->required()->delimiter(',');
  sweep_eps->add_option("--workers", workers, "Parallel members (0 = all cores; default from CHTSIM_WORKERS)");

  auto* verify = app.add_subcommand("verify", "Steady-state and operator self-tests");
  verify->add_option("config", config_path, "INI config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cht::kExitOk : cht::kExitUsage;
  }

  cht::ParsedConfig parsed;
  if (const int code = load(config_path, parsed); code != cht::kExitOk) return code;

  try {
    if (*run) return cht::run_command(parsed, std::cout);
    if (*sweep_m) return cht::sweep_m_command(parsed, values, workers, std::cout);
    if (*sweep_eps) return cht::sweep_eps_command(parsed, values, workers, std::cout);
    return cht::verify_command(parsed, std::cout);
  } catch (const cht::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cht::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cht::kExitUsage;
  }
}
