#pragma once

#include <functional>
#include <vector>

#include "ttqc/amen.hpp"
#include "ttqc/spin_chain.hpp"
#include "ttqc/tensor_train.hpp"

namespace ttqc {

// Gradient-ascent pulse engineering on piecewise-constant controls.  Pulse
// tables are N x K: one row per interval, one column per control channel.
// The figure of merit is the Hilbert-Schmidt overlap with a target density,
// and its exact gradient comes from one augmented forward solve per interval
// and channel paired with a backward costate sweep; no finite differences.

double state_fidelity(const TTVector& target, const TTVector& rho);

// Plain propagation of rho0 under the pulse table.
PropagateResult propagate_pulses(const LiouvilleModel& model,
                                 const RealMatrix& pulses, const TTVector& rho0,
                                 double tau, const TamenOptions& opts);

// d fidelity / d pulses, exact up to solver accuracy.
RealMatrix grape_gradient(const LiouvilleModel& model, const RealMatrix& pulses,
                          const TTVector& rho0, const TTVector& target,
                          double tau, const TamenOptions& opts);

struct GrapeOptions {
  TamenOptions step;
  int max_iters = 200;
  double target_infidelity = 1e-4;
  // Ascent rate: grows on every accepted step, shrinks on rejection; a step
  // is accepted only if the exactly re-evaluated fidelity improves.
  double initial_step = 1e-2;
  double grow = 1.5;
  double shrink = 0.5;
  double min_step = 1e-12;
  // Wall-clock budget in seconds; 0 disables it.  Checked between
  // iterations, so the final iteration always completes and is recorded.
  double deadline_seconds = 0.0;
};

enum class GrapeStop {
  target_reached,
  max_iters,
  step_underflow,  // no improving step above min_step
  stalled,         // gradient vanished
  deadline,        // wall-clock budget exhausted
};

struct GrapeIterate {
  int iter = 0;
  bool accepted = false;   // false only for a final underflow record
  double fidelity = 0.0;   // best fidelity seen up to this iteration
  double grad_norm = 0.0;
  double step_size = 0.0;  // rate that produced the accepted step, 0 if none
  int rejections = 0;      // trial evaluations discarded this iteration
  int max_rank = 0;        // space-time rank high-water across the solves
};

struct GrapeResult {
  RealMatrix pulses;
  double fidelity = 0.0;
  int iterations = 0;
  GrapeStop reason = GrapeStop::max_iters;
  std::vector<GrapeIterate> trace;
};

// Maximizes the transfer fidelity starting from pulses0.  Rejected trials
// never touch the accepted iterate, so the fidelity sequence over accepted
// trace entries is strictly increasing; only the final entry can be an
// unaccepted one, recording the step underflow that stopped the run.
// on_iterate, when set, observes every iteration as it completes.
GrapeResult grape_optimize(
    const LiouvilleModel& model, const RealMatrix& pulses0,
    const TTVector& rho0, const TTVector& target, double tau,
    const GrapeOptions& opts,
    const std::function<void(const GrapeIterate&)>& on_iterate = {});

}  // namespace ttqc
