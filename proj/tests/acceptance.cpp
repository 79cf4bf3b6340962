// End-to-end acceptance checks.  Each criterion exercises one advertised
// behavior at desk scale and prints a single PASS/FAIL line with the measured
// numbers; the exit status is nonzero when any selected criterion fails.
//
// Run with no arguments for all criteria, or pass criterion numbers to run a
// subset, e.g. "acceptance 6 7" shares one transfer optimization between the
// two criteria that inspect it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ttqc/dense_reference.hpp"
#include "ttqc/grape.hpp"
#include "test_util.hpp"

using namespace ttqc;
using testutil::random_op;
using testutil::rel_err;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

RealMatrix random_pulses(int intervals, int channels, unsigned seed,
                         double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-amplitude, amplitude);
  RealMatrix p(intervals, channels);
  for (int n = 0; n < intervals; ++n)
    for (int k = 0; k < channels; ++k) p(n, k) = amp(rng);
  return p;
}

DenseModel dense_model_for(const SpinChainSpec& spec,
                           const std::vector<ControlTerm>& controls) {
  DenseModel m;
  m.h0 = dense_heisenberg(spec.sites, spec.jx, spec.jy, spec.jz);
  for (const ControlTerm& c : controls) {
    Matrix op = c.axis == Axis::x   ? pauli_x()
                : c.axis == Axis::y ? pauli_y()
                                    : pauli_z();
    m.controls.push_back(dense_site_operator(spec.sites, c.site, op));
  }
  return m;
}

// Criterion 1: a five-spin isotropic chain driven by a random piecewise
// constant pulse is propagated in tensor-train form and the endpoint matches
// the dense matrix-exponential reference to 1e-5 relative error, in under a
// minute of wall time for the tensor-train side.
Outcome criterion1() {
  const double j = kTwoPi;
  SpinChainSpec spec{5, j, j, j};
  const std::vector<ControlTerm> controls = {{0, Axis::z}, {2, Axis::x}};
  LiouvilleModel model = build_model(spec, controls);
  const int intervals = 20;
  const double tau = 0.01;
  RealMatrix pulses = random_pulses(intervals, 2, 11, 1.0);

  TamenOptions opts;
  opts.time_order = 8;
  opts.solver.tolerance = 1e-7;
  opts.solver.truncation_eps = 1e-8;

  const std::vector<int> bits = {0, 1, 1, 0, 1};
  TTVector rho = build_pure_density_tt(bits);
  const auto t0 = std::chrono::steady_clock::now();
  for (int n = 0; n < intervals; ++n) {
    StepResult step = tamen_step(interval_generator(model, pulses.row(n).transpose()), rho,
                                 tau, opts);
    if (!step.solve.converged)
      return {false, fmt("interval %d failed to converge", n)};
    rho = step.state;
  }
  const double tt_seconds = seconds_since(t0);

  DenseModel dm = dense_model_for(spec, controls);
  Matrix ref = dense_propagate(dm, pulses, dense_pure_density(bits), tau);
  const double rel =
      rel_err(tt_dense(rho), to_fused_order(dense_vec(ref), spec.sites));

  const bool pass = rel <= 1e-5 && tt_seconds <= 60.0;
  return {pass, fmt("endpoint rel err %.3g (<= 1e-5), tensor-train time %.1fs "
                    "(<= 60s)",
                    rel, tt_seconds)};
}

// Criterion 2: the adjoint gradient of the transfer fidelity agrees with a
// central finite difference of the dense propagation componentwise to 1e-4,
// for random pulse tables at two to four spins, and the two dense gradient
// oracles agree with each other at second order in the step.
Outcome criterion2() {
  std::string detail;
  for (int d : {2, 3, 4}) {
    SpinChainSpec spec{d, 1.3, 0.7, 1.0};
    std::vector<ControlTerm> controls = {{0, Axis::z}, {d - 1, Axis::x}};
    LiouvilleModel model = build_model(spec, controls);
    DenseModel dm = dense_model_for(spec, controls);

    const int intervals = d + 2;  // 4, 5, 6
    const double tau = 0.05;
    RealMatrix pulses = random_pulses(intervals, 2, 100 + d, 1.0);

    std::vector<int> bits(d, 1);
    bits.front() = 0;
    std::vector<int> target_bits(d, 1);
    target_bits.back() = 0;
    TTVector rho0 = build_pure_density_tt(bits);
    TTVector target = build_pure_density_tt(target_bits);
    Matrix rho0_d = dense_pure_density(bits);
    Matrix target_d = dense_pure_density(target_bits);

    TamenOptions opts;
    opts.solver.tolerance = 1e-9;
    opts.solver.truncation_eps = 1e-11;
    RealMatrix grad = grape_gradient(model, pulses, rho0, target, tau, opts);
    RealMatrix fd =
        dense_gradient_fd(dm, pulses, rho0_d, target_d, tau, 1e-4);

    double worst = 0.0;
    for (int n = 0; n < intervals; ++n)
      for (int k = 0; k < 2; ++k) {
        if (std::abs(fd(n, k)) <= 1e-8) continue;
        worst = std::max(worst,
                         std::abs(grad(n, k) - fd(n, k)) / std::abs(fd(n, k)));
      }
    if (worst > 1e-4)
      return {false, fmt("%d spins: gradient vs finite difference rel err "
                         "%.3g > 1e-4",
                         d, worst)};

    // The dense adjoint oracle and the dense central difference must agree
    // to O(delta^2): halving delta shrinks the gap about fourfold.
    RealMatrix adj = dense_adjoint_gradient(dm, pulses, rho0_d, target_d, tau);
    const double e1 =
        (adj - dense_gradient_fd(dm, pulses, rho0_d, target_d, tau, 2e-3))
            .cwiseAbs()
            .maxCoeff();
    const double e2 =
        (adj - dense_gradient_fd(dm, pulses, rho0_d, target_d, tau, 1e-3))
            .cwiseAbs()
            .maxCoeff();
    const bool quadratic = (e1 < 1e-9 && e2 < 1e-9) || e1 / e2 >= 2.5;
    if (!quadratic)
      return {false, fmt("%d spins: oracle gap ratio %.2f not second order "
                         "(gaps %.3g, %.3g)",
                         d, e1 / e2, e1, e2)};
    detail += fmt("%s%d spins rel %.2g ratio %.1f", d == 2 ? "" : "; ", d,
                  worst, e2 > 0 ? e1 / e2 : 4.0);
  }
  return {true, detail};
}

// Criterion 3: one hundred random piecewise-constant intervals on five spins
// conserve the Frobenius norm to 1e-6 and the trace to 1e-8, with no rescaling
// hiding the drift.
Outcome criterion3() {
  const double j = kTwoPi;
  SpinChainSpec spec{5, j, j, j};
  const std::vector<ControlTerm> controls = {{0, Axis::z}, {2, Axis::x}};
  LiouvilleModel model = build_model(spec, controls);
  const int intervals = 100;
  const double tau = 0.01;
  RealMatrix pulses = random_pulses(intervals, 2, 33, 1.0);

  TamenOptions opts;
  opts.conserve = false;
  opts.solver.tolerance = 1e-8;
  opts.solver.truncation_eps = 1e-9;

  TTVector rho = build_pure_density_tt({0, 1, 1, 0, 1});
  const double norm0 = tt_norm(rho);
  const double trace0 = tt_trace(rho).real();
  double worst_norm = 0.0;
  double worst_trace = 0.0;
  for (int n = 0; n < intervals; ++n) {
    StepResult step = tamen_step(interval_generator(model, pulses.row(n).transpose()), rho,
                                 tau, opts);
    if (!step.solve.converged)
      return {false, fmt("interval %d failed to converge", n)};
    rho = step.state;
    worst_norm = std::max(worst_norm,
                          std::abs(tt_norm(rho) - norm0) / norm0);
    worst_trace =
        std::max(worst_trace, std::abs(tt_trace(rho).real() - trace0));
  }
  const bool pass = worst_norm <= 1e-6 && worst_trace <= 1e-8;
  return {pass, fmt("norm drift %.3g (<= 1e-6), trace drift %.3g (<= 1e-8) "
                    "over %d intervals",
                    worst_norm, worst_trace, intervals)};
}

// Criterion 4: with the interval length fixed, raising the number of
// collocation nodes from 2 to 8 drives the one-step error down monotonically
// by at least two orders of magnitude.
Outcome criterion4() {
  const double j = 4.0 * kTwoPi;
  SpinChainSpec spec{3, j, j, j};
  LiouvilleModel model = build_model(spec, {});
  DenseModel dm = dense_model_for(spec, {});
  const double tau = 0.01;
  const std::vector<int> bits = {0, 1, 1};
  TTVector rho0 = build_pure_density_tt(bits);
  const Vector ref = to_fused_order(
      dense_vec(dense_step(dm, RealVector(0), dense_pure_density(bits), tau)),
      spec.sites);

  std::vector<double> errors;
  std::string detail = "errors";
  for (int nodes : {2, 4, 6, 8}) {
    TamenOptions opts;
    opts.time_order = nodes;
    opts.conserve = false;
    opts.solver.tolerance = 1e-10;
    opts.solver.truncation_eps = 1e-12;
    StepResult step = tamen_step(model.drift, rho0, tau, opts);
    errors.push_back(rel_err(tt_dense(step.state), ref));
    detail += fmt(" %.3g", errors.back());
  }
  bool monotone = true;
  for (size_t i = 1; i < errors.size(); ++i)
    monotone = monotone && errors[i] < errors[i - 1];
  const double gain = errors.front() / errors.back();
  const bool pass = monotone && gain >= 100.0 && errors.back() <= 1e-5;
  return {pass, detail + fmt(", monotone %s, total gain %.1e (>= 1e2)",
                             monotone ? "yes" : "no", gain)};
}

// Criterion 5: a five-spin excitation transfer with a single local sigma_z
// control and a zero starting pulse reaches infidelity 1e-2 inside thirty
// minutes.  The horizon sits at the first free-transfer arrival (fidelity
// about 0.84 under the bare chain), the optimization runs with a light
// solver, and the final pulse is certified by an independent tight
// propagation whose fidelity decides the check.
Outcome criterion5() {
  const double j = kTwoPi;
  SpinChainSpec spec{5, j, j, j};
  LiouvilleModel model = build_model(spec, {{0, Axis::z}});
  TTVector rho0 = build_pure_density_tt({0, 1, 1, 1, 1});
  TTVector target = build_pure_density_tt({1, 1, 1, 1, 0});
  const double tau = 0.035;
  const int intervals = 20;

  GrapeOptions opts;
  opts.step.time_order = 6;  // per-step error near 1e-8, ample for 1e-2
  opts.step.solver.tolerance = 3e-5;
  opts.step.solver.truncation_eps = 3e-6;
  opts.step.solver.enrich_rank = 2;
  opts.max_iters = 100000;
  opts.target_infidelity = 5e-3;  // leave certification margin
  // The basin around the zero pulse is shallow (gradient norm about 0.02),
  // so the rate starts large and doubles; rejected trials shrink it back.
  opts.initial_step = 100.0;
  opts.grow = 2.0;
  opts.deadline_seconds = 1440.0;  // iterations finish, so stay well inside

  const auto t0 = std::chrono::steady_clock::now();
  GrapeResult res = grape_optimize(model, RealMatrix::Zero(intervals, 1), rho0,
                                   target, tau, opts);

  TamenOptions tight;
  tight.solver.tolerance = 1e-7;
  tight.solver.truncation_eps = 1e-8;
  PropagateResult check =
      propagate_pulses(model, res.pulses, rho0, tau, tight);
  const double infidelity = 1.0 - state_fidelity(target, check.state);
  const double elapsed = seconds_since(t0);
  const bool pass = infidelity <= 1e-2 && elapsed <= 1800.0;
  return {pass, fmt("certified infidelity %.3g (<= 1e-2) after %d iterations, "
                    "%.0fs (<= 1800s)",
                    infidelity, res.iterations, elapsed)};
}

// Criteria 6 and 7 share one eleven-spin transfer optimization; the run is
// cached so that "acceptance 6 7" performs it once.
struct TransferRun {
  bool done = false;
  LiouvilleModel model;
  TTVector rho0;
  TTVector target;
  double tau = 0.01;
  int intervals = 500;
  double elapsed = 0.0;
  GrapeResult res;
};

TransferRun& transfer11() {
  static TransferRun run;
  if (run.done) return run;
  // The couplings are scaled so that the free-evolution transfer peak of the
  // eleven-spin chain (fidelity 0.345) lands exactly at the horizon T = 5,
  // which is the best zero-pulse starting point the uniform chain offers.
  const double j = 0.102 * kTwoPi;
  SpinChainSpec spec{11, j, j, j};
  run.model = build_model(spec, {{0, Axis::z}});
  std::vector<int> bits(11, 1);
  bits.front() = 0;
  std::vector<int> target_bits(11, 1);
  target_bits.back() = 0;
  run.rho0 = build_pure_density_tt(bits);
  run.target = build_pure_density_tt(target_bits);

  GrapeOptions opts;
  // Tighter interval tolerances are faster here, not slower: they keep the
  // state free of truncation debris, and rank, not sweep count, drives cost.
  opts.step.solver.tolerance = 1e-6;
  opts.step.solver.truncation_eps = 1e-7;
  opts.step.solver.enrich_rank = 2;
  opts.max_iters = 100000;
  opts.target_infidelity = 0.1;
  // The transfer basin is shallow (gradient norm 0.04); measured gains are
  // linear in the rate up to 250, so start there instead of creeping up.
  opts.initial_step = 250.0;
  opts.grow = 1.5;
  opts.deadline_seconds = 3300.0;

  const auto t0 = std::chrono::steady_clock::now();
  run.res = grape_optimize(run.model, RealMatrix::Zero(run.intervals, 1),
                           run.rho0, run.target, run.tau, opts);
  run.elapsed = seconds_since(t0);
  run.done = true;
  return run;
}

// Criterion 6: the eleven-spin transfer reaches infidelity 0.1 inside an
// hour, and the infidelity strictly decreases over the accepted iterations.
Outcome criterion6() {
  TransferRun& run = transfer11();
  double last = 2.0;
  bool decreasing = true;
  int accepted = 0;
  for (const GrapeIterate& it : run.res.trace) {
    if (!it.accepted) continue;
    ++accepted;
    const double inf = 1.0 - it.fidelity;
    decreasing = decreasing && inf < last;
    last = inf;
  }
  const double infidelity = 1.0 - run.res.fidelity;
  const bool pass = infidelity <= 0.1 && run.elapsed <= 3600.0 && decreasing;
  return {pass, fmt("infidelity %.3g (<= 0.1) after %d accepted iterations, "
                    "%.0fs (<= 3600s), decreasing %s",
                    infidelity, accepted, run.elapsed,
                    decreasing ? "yes" : "no")};
}

// Criterion 7: propagating the optimized pulse from criterion 6 keeps every
// stored state at tensor-train rank 30 or below.
Outcome criterion7() {
  TransferRun& run = transfer11();
  TamenOptions opts;
  opts.solver.tolerance = 1e-6;
  opts.solver.truncation_eps = 1e-7;
  opts.solver.enrich_rank = 2;
  TTVector rho = run.rho0;
  int worst = rho.max_rank();
  for (int n = 0; n < run.intervals; ++n) {
    StepResult step = tamen_step(
        interval_generator(run.model, run.res.pulses.row(n).transpose()), rho, run.tau,
        opts);
    if (!step.solve.converged)
      return {false, fmt("interval %d failed to converge", n)};
    rho = step.state;
    worst = std::max(worst, rho.max_rank());
  }
  return {worst <= 30, fmt("largest state rank %d (<= 30) across %d states",
                           worst, run.intervals + 1)};
}

// Criterion 8: the cost of one gradient pass grows linearly with the number
// of intervals.  The initial and target states are first evolved to rank
// saturation so every interval does comparable work; the per-interval times
// across N = 10, 20, 40 must stay within 25 percent of their mean.
Outcome criterion8() {
  const double j = kTwoPi;
  SpinChainSpec spec{5, j, j, j};
  LiouvilleModel model = build_model(spec, {{0, Axis::z}});
  TamenOptions opts;
  opts.solver.tolerance = 1e-5;
  opts.solver.truncation_eps = 1e-6;
  const double tau = 0.01;

  auto saturate = [&](std::vector<int> bits, unsigned seed) {
    TTVector rho = build_pure_density_tt(bits);
    RealMatrix drive = random_pulses(100, 1, seed, 1.0);
    for (int n = 0; n < 100; ++n) {
      StepResult step = tamen_step(interval_generator(model, drive.row(n).transpose()),
                                   rho, tau, opts);
      rho = step.state;
    }
    return rho;
  };
  TTVector rho0 = saturate({0, 1, 1, 1, 1}, 7);
  TTVector target = saturate({1, 1, 1, 1, 0}, 8);

  std::vector<double> per_interval;
  std::string detail;
  for (int n : {10, 20, 40}) {
    RealMatrix pulses = random_pulses(n, 1, 9, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    grape_gradient(model, pulses, rho0, target, tau, opts);
    const double dt = seconds_since(t0);
    per_interval.push_back(dt / n);
    detail += fmt("%sN=%d %.3fs/interval", n == 10 ? "" : ", ", n, dt / n);
  }
  const double mean =
      (per_interval[0] + per_interval[1] + per_interval[2]) / 3.0;
  const double lo = *std::min_element(per_interval.begin(), per_interval.end());
  const double hi = *std::max_element(per_interval.begin(), per_interval.end());
  const bool pass = hi <= 1.25 * mean && lo >= 0.75 * mean;
  return {pass, detail + fmt("; spread %+.0f%% / %+.0f%% of mean (within 25%%)",
                             100.0 * (hi / mean - 1.0),
                             100.0 * (lo / mean - 1.0))};
}

// Criterion 9: the tensor-train kernel properties hold at five sites with
// tolerances between 1e-10 and 1e-12: dense round trips, the rounding error
// bound, gauge isometries, and agreement of dot and apply with the dense
// oracles.
Outcome criterion9() {
  std::mt19937_64 rng(2024);
  for (const std::vector<int>& modes :
       std::vector<std::vector<int>>{{2, 3, 4, 3, 2}, {4, 4, 4, 4, 4}}) {
    std::vector<int> ranks(modes.size() - 1, 5);
    TTVector x = tt_random(modes, ranks, rng);
    Vector dx = tt_dense(x);

    // Dense round trip.
    TTVector back = tt_from_dense(dx, modes, {1e-13, 0});
    if (rel_err(tt_dense(back), dx) > 1e-12)
      return {false, "dense round trip above 1e-12"};

    // Rounding honors the requested relative error and its own report.
    for (double eps : {1e-2, 1e-6, 1e-10}) {
      RoundReport rep;
      TTVector y = tt_round(x, {eps, 0}, &rep);
      const double err = rel_err(tt_dense(y), dx);
      if (err > eps * (1.0 + 1e-10) || err > rep.error_bound + 1e-14)
        return {false, fmt("rounding bound violated at eps %.0e", eps)};
    }

    // Gauge: orthogonalization preserves the tensor and sets isometries.
    for (int pivot : {0, 2, 4}) {
      TTVector y = orthogonalize(x, pivot);
      if (rel_err(tt_dense(y), dx) > 1e-12)
        return {false, "orthogonalize changed the tensor"};
      for (int k = 0; k < pivot; ++k) {
        Matrix q = y.block(k).vfold();
        if ((q.adjoint() * q - Matrix::Identity(q.cols(), q.cols())).norm() >
            1e-12)
          return {false, fmt("left isometry defect at block %d", k)};
      }
      for (int k = pivot + 1; k < y.order(); ++k) {
        Matrix q = y.block(k).hfold();
        if ((q * q.adjoint() - Matrix::Identity(q.rows(), q.rows())).norm() >
            1e-12)
          return {false, fmt("right isometry defect at block %d", k)};
      }
    }

    // Inner product and operator application against dense references.
    TTVector z = tt_random(modes, ranks, rng);
    const Complex dot = tt_dot(x, z);
    const Complex want = (dx.adjoint() * tt_dense(z))(0);
    if (std::abs(dot - want) / std::abs(want) > 1e-10)
      return {false, "inner product disagrees with the dense oracle"};
    TTOperator a = random_op(modes, std::vector<int>(modes.size() - 1, 3), rng);
    if (rel_err(tt_dense(tt_apply(a, x)), op_dense(a) * dx) > 1e-10)
      return {false, "operator application disagrees with the dense oracle"};
  }
  return {true, "round trip, rounding bound, gauge, dot and apply all hold"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 9) {
      std::fprintf(stderr, "unknown criterion '%s' (expect 1..9)\n", argv[i]);
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty())
    selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  Outcome (*criteria[])() = {criterion1, criterion2, criterion3,
                             criterion4, criterion5, criterion6,
                             criterion7, criterion8, criterion9};
  bool all_pass = true;
  for (int n : selected) {
    Outcome out = criteria[n - 1]();
    all_pass = all_pass && out.pass;
    std::printf("criterion %d: %s - %s\n", n, out.pass ? "PASS" : "FAIL",
                out.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
