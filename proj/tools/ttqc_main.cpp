#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ttqc/experiment.hpp"

namespace {

struct Args {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<double> target_infidelity;
};

void add_common_flags(CLI::App* cmd, Args& args) {
  cmd->add_option("--config", args.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir,
                  "output directory (overrides [output] directory)");
  cmd->add_option("--seed", args.seed,
                  "random-pulse seed (overrides [pulse] seed)");
  cmd->add_option("--max-iters", args.max_iters,
                  "iteration cap (overrides [grape] max_iters)");
  cmd->add_option("--target-infidelity", args.target_infidelity,
                  "stop once 1 - fidelity falls below this "
                  "(overrides [grape] target_infidelity)");
}

int run(const Args& args, std::optional<ttqc::RunMode> forced_mode) {
  ttqc::ExperimentConfig cfg = ttqc::load_config(args.config_path);
  if (forced_mode) cfg.mode = *forced_mode;
  ttqc::CliOverrides over;
  over.out_dir = args.out_dir;
  over.seed = args.seed;
  over.max_iters = args.max_iters;
  over.target_infidelity = args.target_infidelity;
  ttqc::apply_overrides(cfg, over);
  if (cfg.mode == ttqc::RunMode::optimize && cfg.controls.empty())
    throw ttqc::ConfigError(args.config_path +
                            ": optimize mode needs at least one control in "
                            "[model]");
  if (!forced_mode) {
    // validate: echo the fully resolved config and stop.
    std::cout << ttqc::emit_config(cfg);
    return 0;
  }
  return ttqc::run_experiment(cfg, std::cout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-train pulse engineering for spin chains"};
  app.require_subcommand(1);

  Args args;
  CLI::App* propagate = app.add_subcommand(
      "propagate", "integrate the density matrix under the configured pulse");
  CLI::App* optimize = app.add_subcommand(
      "optimize", "run gradient-ascent pulse optimization");
  CLI::App* validate = app.add_subcommand(
      "validate", "parse the config, apply defaults and echo the result");
  add_common_flags(propagate, args);
  add_common_flags(optimize, args);
  add_common_flags(validate, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (propagate->parsed()) return run(args, ttqc::RunMode::propagate);
    if (optimize->parsed()) return run(args, ttqc::RunMode::optimize);
    return run(args, std::nullopt);
  } catch (const ttqc::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ttqc: " << e.what() << '\n';
    return 1;
  }
}
