#include "ttqc/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "ttqc/grape.hpp"

namespace ttqc {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TamenOptions step_options(const ExperimentConfig& cfg) {
  TamenOptions t;
  t.time_order = cfg.solver.nodes;
  t.solver.tolerance = cfg.solver.tolerance;
  t.solver.truncation_eps = cfg.solver.truncation;
  t.solver.enrich_rank = cfg.solver.enrichment;
  t.solver.max_sweeps = cfg.solver.max_sweeps;
  return t;
}

void write_pulses(const std::filesystem::path& path, const RealMatrix& pulses,
                  double tau) {
  std::ofstream out(path);
  out << "midpoint_time,amplitude\n";
  for (Eigen::Index n = 0; n < pulses.rows(); ++n)
    for (Eigen::Index k = 0; k < pulses.cols(); ++k)
      out << fmt((static_cast<double>(n) + 0.5) * tau) << ','
          << fmt(pulses(n, k)) << '\n';
}

const char* stop_name(GrapeStop reason) {
  switch (reason) {
    case GrapeStop::target_reached: return "target_reached";
    case GrapeStop::max_iters: return "max_iters";
    case GrapeStop::step_underflow: return "step_underflow";
    case GrapeStop::stalled: return "stalled";
    case GrapeStop::deadline: return "deadline";
  }
  return "unknown";
}

}  // namespace

void apply_overrides(ExperimentConfig& cfg, const CliOverrides& over) {
  if (over.out_dir) cfg.out_dir = *over.out_dir;
  if (over.seed) cfg.seed = *over.seed;
  if (over.max_iters) {
    if (*over.max_iters < 0)
      throw ConfigError("--max-iters must be non-negative");
    cfg.grape.max_iters = *over.max_iters;
  }
  if (over.target_infidelity) {
    if (*over.target_infidelity <= 0.0)
      throw ConfigError("--target-infidelity must be positive");
    cfg.grape.target_infidelity = *over.target_infidelity;
  }
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  LiouvilleModel model =
      build_model({cfg.sites, cfg.jx, cfg.jy, cfg.jz}, cfg.controls);
  TTVector rho0 = build_pure_density_tt(cfg.state_initial);
  TTVector target = build_pure_density_tt(cfg.state_target);
  RealMatrix pulses = initial_pulses(cfg);
  const TamenOptions topts = step_options(cfg);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  std::string status = "ok";
  std::string termination;
  double fidelity = 0.0;
  int exit_code = 0;
  int iterations = 0;
  int intervals_done = 0;

  if (cfg.mode == RunMode::propagate) {
    write_pulses(dir / "pulse.csv", pulses, cfg.tau);
    std::ofstream traj(dir / "trajectory.csv");
    traj << "time,frobenius_norm,trace_re,target_overlap";
    for (int s = 0; s < cfg.sites; ++s) traj << ",sz_" << s;
    traj << ",max_rank\n";
    auto row = [&](double t, const TTVector& rho, int rank) {
      traj << fmt(t) << ',' << fmt(tt_norm(rho)) << ','
           << fmt(tt_trace(rho).real()) << ','
           << fmt(state_fidelity(target, rho));
      for (int s = 0; s < cfg.sites; ++s) traj << ',' << fmt(site_sz(rho, s));
      traj << ',' << rank << '\n' << std::flush;
    };

    TTVector rho = rho0;
    row(0.0, rho, rho.max_rank());
    for (int n = 0; n < cfg.intervals; ++n) {
      TTOperator gen = interval_generator(model, pulses.row(n).transpose());
      try {
        StepResult step = tamen_step(gen, rho, cfg.tau, topts);
        if (!step.solve.converged)
          throw std::runtime_error("local solves stalled");
        rho = std::move(step.state);
        row((n + 1) * cfg.tau, rho, step.spacetime.max_rank());
        ++intervals_done;
      } catch (const std::runtime_error& e) {
        status = std::string("solver_failure: ") + e.what();
        exit_code = 1;
        break;
      }
    }
    fidelity = state_fidelity(target, rho);
    termination = exit_code == 0 ? "completed" : "aborted";
    log << "propagate: " << intervals_done << '/' << cfg.intervals
        << " intervals, target overlap " << fmt(fidelity) << '\n';
  } else {
    GrapeOptions gopts;
    gopts.step = topts;
    gopts.max_iters = cfg.grape.max_iters;
    gopts.target_infidelity = cfg.grape.target_infidelity;
    gopts.initial_step = cfg.grape.initial_step;
    gopts.grow = cfg.grape.grow;
    gopts.shrink = cfg.grape.shrink;

    std::ofstream conv(dir / "convergence.csv");
    conv << "iteration,wall_seconds,fidelity,infidelity,step_size,max_rank,"
            "accepted\n";
    auto on_iterate = [&](const GrapeIterate& it) {
      conv << it.iter << ',' << fmt(elapsed()) << ',' << fmt(it.fidelity)
           << ',' << fmt(1.0 - it.fidelity) << ',' << fmt(it.step_size) << ','
           << it.max_rank << ',' << (it.accepted ? 1 : 0) << '\n'
           << std::flush;
      log << "iter " << it.iter << ": infidelity "
          << fmt(1.0 - it.fidelity) << ", step " << fmt(it.step_size)
          << ", rank " << it.max_rank
          << (it.accepted ? "" : " (no improving step)") << '\n';
    };

    try {
      GrapeResult res = grape_optimize(model, pulses, rho0, target, cfg.tau,
                                       gopts, on_iterate);
      pulses = std::move(res.pulses);
      fidelity = res.fidelity;
      iterations = res.iterations;
      termination = stop_name(res.reason);
    } catch (const std::runtime_error& e) {
      status = std::string("solver_failure: ") + e.what();
      termination = "aborted";
      exit_code = 1;
    }
    write_pulses(dir / "pulse.csv", pulses, cfg.tau);
    log << "optimize: " << termination << ", final infidelity "
        << fmt(1.0 - fidelity) << '\n';
  }

  std::ofstream sum(dir / "summary.txt");
  sum << "status = " << status << '\n';
  sum << "termination = " << termination << '\n';
  sum << "final_fidelity = " << fmt(fidelity) << '\n';
  sum << "final_infidelity = " << fmt(1.0 - fidelity) << '\n';
  if (cfg.mode == RunMode::propagate)
    sum << "intervals_completed = " << intervals_done << '\n';
  else
    sum << "iterations = " << iterations << '\n';
  sum << "wall_seconds = " << fmt(elapsed()) << '\n';
  sum << "\n# resolved configuration\n" << emit_config(cfg);
  return exit_code;
}

}  // namespace ttqc
