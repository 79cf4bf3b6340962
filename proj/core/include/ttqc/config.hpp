#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttqc/spin_chain.hpp"

namespace ttqc {

// Experiment definitions live in a flat INI-style text format:
//
//   mode = optimize
//
//   [model]
//   sites = 5
//   jx = 6.283185307179586
//   control = 0 z            # repeatable: <site> <axis>
//   state_initial = udddd    # u = spin up = bit 0, one letter per site
//
//   [pulse]
//   duration = 5
//   tau = 0.01
//
// plus [solver], [grape] and [output] sections.  '#' starts a comment, later
// assignments override earlier ones, and every diagnostic carries the file
// name, line number and the offending key.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { propagate, optimize };
enum class PulseInit { zero, random_small };

struct SolverSection {
  int nodes = 8;             // spectral nodes per interval
  double truncation = 1e-6;  // TT rounding tolerance
  // Linear-solve residual target.  Rounding at `truncation` puts a floor
  // under the reachable residual, so this must not be tighter; the default
  // stays an order of magnitude above the floor.
  double tolerance = 1e-5;
  int enrichment = 4;
  int max_sweeps = 20;
};

struct GrapeSection {
  double initial_step = 1e-2;
  double grow = 1.5;
  double shrink = 0.5;
  int max_iters = 200;
  double target_infidelity = 1e-4;
};

struct ExperimentConfig {
  RunMode mode = RunMode::propagate;

  int sites = 0;  // required
  double jx = 1.0;
  double jy = 1.0;
  double jz = 1.0;
  std::vector<ControlTerm> controls;
  // Bit strings, 0 = up.  When a config omits them, validation fills in the
  // end-to-end transfer pair: up at the first site versus up at the last,
  // all other spins down.
  std::vector<int> state_initial;
  std::vector<int> state_target;

  double duration = 0.0;  // required
  double tau = 0.01;
  PulseInit init = PulseInit::zero;
  std::uint64_t seed = 0;

  SolverSection solver;
  GrapeSection grape;
  std::string out_dir = ".";

  int intervals = 0;  // derived: duration / tau, validated to be whole
};

// Parses and fully validates; every error message reads source:line: text.
ExperimentConfig parse_config(std::string_view text, std::string_view source);
ExperimentConfig load_config(const std::string& path);

// Canonical text form with every field explicit; parses back to an identical
// config (numbers are written with 17 significant digits).
std::string emit_config(const ExperimentConfig& cfg);

// The configured starting pulse table, N x K: all zeros, or uniform in
// [-0.1, 0.1] drawn row by row from a mt19937_64 seeded as configured.
RealMatrix initial_pulses(const ExperimentConfig& cfg);

}  // namespace ttqc
