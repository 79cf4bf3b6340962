#pragma once

#include <functional>
#include <vector>

#include "ttqc/spectral.hpp"
#include "ttqc/tensor_train.hpp"

namespace ttqc {

// Alternating one-site linear solver for A x = f in tensor-train form.  Each
// sweep optimizes one block at a time inside the orthogonal frame of the
// others; a low-rank train z tracking the residual f - A x supplies extra
// basis vectors at every bond move, which is what lets ranks grow adaptively
// where plain ALS would stagnate.
struct SolverOptions {
  double tolerance = 1e-8;     // sweep target: max local relative residual
  int max_sweeps = 20;
  int enrich_rank = 4;         // residual basis width; 0 gives plain ALS
  int max_rank = 0;            // bond cap applied when truncating, 0 = none
  double truncation_eps = 1e-10;
  int dense_direct_max = 512;  // largest local system solved by dense LU
  // Iterative local solves target 0.3 * tolerance; raising this floor trades
  // local accuracy for speed.
  double local_rtol = 0.0;
  int local_max_iters = 400;
  int gmres_restart = 50;
  bool precondition = true;    // Jacobi-precondition the iterative solves
  bool certify = false;        // evaluate the exact residual after the loop
};

struct SweepRecord {
  int sweep = 0;
  double residual = 0.0;
  int max_rank = 0;
};

struct SolveReport {
  int sweeps = 0;
  // Convergence measure of the last sweep: the worst local residual combined
  // with the norm of the residual train relative to |f|.  With enrichment
  // disabled only the local part exists, which certifies stationarity of the
  // alternating scheme rather than a small global residual.
  double residual = 0.0;
  bool converged = false;
  double certified = -1.0;  // exact |f - A x| / |f| when certify is set
  std::vector<SweepRecord> history;
};

// Solves A x = f starting from x0.  Local residuals are measured before each
// local solve, so the reported value reflects the state the iterate was
// actually left in.
TTVector amen_solve(const TTOperator& a, const TTVector& f, const TTVector& x0,
                    const SolverOptions& opts, SolveReport* report = nullptr);

// One spectral-in-time step of dx/dt = -i gen x over [0, tau]: all
// collocation nodes are solved as a single space-time train, the endpoint is
// sliced out and rounded.  err_est compares the computed endpoint against
// the lower-degree interpolant through the interior nodes, which vanishes
// exactly when the time resolution is sufficient.
struct TamenOptions {
  SolverOptions solver;
  int time_order = 8;  // collocation nodes per interval, 1..16
  // The flow is norm-preserving, so the endpoint norm is pulled back to the
  // input norm and the relative change is reported as norm_drift.  Steps
  // whose drift exceeds max_norm_drift are refused rather than patched.
  bool conserve = true;
  double max_norm_drift = 1e-3;
};

struct StepResult {
  TTVector state;      // x(tau)
  TTVector spacetime;  // all-node solution with the time mode last
  double err_est = 0.0;
  double norm_drift = 0.0;  // relative norm change before any rescale
  SolveReport solve;
};

StepResult tamen_step(const TTOperator& gen, const TTVector& state, double tau,
                      const TamenOptions& opts);

// Piecewise-constant propagation over equal intervals; gen_at(n) supplies
// the generator on interval n.  Stops early if a step's linear solve fails
// to converge, leaving completed false and the per-interval records
// truncated at the failure.
struct PropagateResult {
  TTVector state;
  std::vector<double> err_est;
  std::vector<double> norm_drift;
  std::vector<int> max_rank;  // space-time solution rank per interval
  bool completed = false;
};

PropagateResult propagate(const std::function<TTOperator(int)>& gen_at,
                          int intervals, const TTVector& rho0, double tau,
                          const TamenOptions& opts);

}  // namespace ttqc
