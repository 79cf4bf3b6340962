#pragma once

#include <optional>
#include <ostream>

#include "ttqc/config.hpp"

namespace ttqc {

// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<double> target_infidelity;
};

void apply_overrides(ExperimentConfig& cfg, const CliOverrides& over);

// Runs the configured experiment and writes plain-text artifacts under
// cfg.out_dir, all with one header line and 17-significant-digit numbers:
//   pulse.csv        midpoint_time,amplitude; one row per (interval, channel)
//   trajectory.csv   propagate mode: observables after every interval
//   convergence.csv  optimize mode: one row per iteration, flushed as it lands
//   summary.txt      outcome plus the fully resolved configuration
// Progress goes to log.  Returns 0 on success, 1 when the solver gave up;
// whatever was already flushed stays on disk.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace ttqc
