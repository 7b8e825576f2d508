#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mhdbl/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mhdbl: steady MHD boundary-layer stability laboratory"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool print_defaults = false;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--seed", seed, "RNG seed (overrides config)");
  app.add_option("--threads", threads, "worker threads (overrides config)");
  app.add_flag("--print-defaults", print_defaults, "print the default config and exit");

  auto* c_profile = app.add_subcommand("profile-check", "validate background assumptions");
  auto* c_weight = app.add_subcommand("weight-check", "verify the weight-function bounds");
  auto* c_linear = app.add_subcommand("linear-solve", "solve the linearized system");
  auto* c_mms = app.add_subcommand("mms-convergence", "manufactured-solution order study");
  auto* c_nonlin = app.add_subcommand("nonlinear-solve", "fixed-point iteration");
  auto* c_sweep = app.add_subcommand("sweep", "eps sweep with estimate ratios and fits");

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_defaults) {
      std::printf("%s\n", mhdbl::config_to_json(mhdbl::default_config()).c_str());
      return 0;
    }
    mhdbl::RunConfig cfg =
        config_path.empty() ? mhdbl::default_config() : mhdbl::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed != 0) cfg.seed = seed;
    if (threads != 0) cfg.threads = threads;
    mhdbl::validate_config(cfg);

    if (c_profile->parsed()) return mhdbl::run_profile_check(cfg);
    if (c_weight->parsed()) return mhdbl::run_weight_check(cfg);
    if (c_linear->parsed()) return mhdbl::run_linear_solve(cfg);
    if (c_mms->parsed()) return mhdbl::run_mms_convergence(cfg);
    if (c_nonlin->parsed()) return mhdbl::run_nonlinear_solve(cfg);
    if (c_sweep->parsed()) return mhdbl::run_sweep(cfg);
    std::fprintf(stderr, "no subcommand given (see --help)\n");
    return 2;
  } catch (const mhdbl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
