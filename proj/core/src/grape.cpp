#include "ttqc/grape.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace ttqc {

namespace {

struct ForwardPass {
  std::vector<TTVector> states;  // states[n] = rho(t_n), n = 0..N
  double fidelity = 0.0;
  int max_rank = 0;  // largest space-time solution rank over the intervals
};

ForwardPass eval_forward(const LiouvilleModel& model, const RealMatrix& pulses,
                         const TTVector& rho0, const TTVector& target,
                         double tau, const TamenOptions& opts) {
  const int intervals = static_cast<int>(pulses.rows());
  ForwardPass fp;
  fp.states.reserve(intervals + 1);
  fp.states.push_back(rho0);
  for (int n = 0; n < intervals; ++n) {
    TTOperator gen = interval_generator(model, pulses.row(n).transpose());
    StepResult step = tamen_step(gen, fp.states.back(), tau, opts);
    if (!step.solve.converged)
      throw std::runtime_error("grape: forward solve did not converge");
    fp.max_rank = std::max(fp.max_rank, step.spacetime.max_rank());
    fp.states.push_back(std::move(step.state));
  }
  fp.fidelity = state_fidelity(target, fp.states.back());
  return fp;
}

// Backward costate sweep interleaved with one augmented solve per interval
// and channel.  The augmented train carries (d rho / d c, rho); slicing out
// the derivative channel and pairing it with the costate at the interval end
// gives the exact fidelity derivative for that pulse entry.
RealMatrix gradient_from(const LiouvilleModel& model, const RealMatrix& pulses,
                         const std::vector<TTVector>& states,
                         const TTVector& target, double tau,
                         const TamenOptions& opts, int* rank_high = nullptr) {
  const int intervals = static_cast<int>(pulses.rows());
  const int channels = static_cast<int>(pulses.cols());
  TamenOptions aug_opts = opts;
  aug_opts.conserve = false;  // the joint train is not norm-preserving

  TTBlock head(1, 2, 1);
  head.at(0, 0, 0) = Complex(0.0, 0.0);
  head.at(0, 1, 0) = Complex(1.0, 0.0);

  RealMatrix grad(intervals, channels);
  TTVector lambda = target;
  for (int n = intervals - 1; n >= 0; --n) {
    TTOperator gen = interval_generator(model, pulses.row(n).transpose());
    for (int k = 0; k < channels; ++k) {
      TTOperator aug = build_augmented_operator(gen, model.control_ops[k]);
      TTVector x0 = tt_prepend_block(states[n], head);
      StepResult step = tamen_step(aug, x0, tau, aug_opts);
      if (!step.solve.converged)
        throw std::runtime_error("grape: gradient solve did not converge");
      if (rank_high)
        *rank_high = std::max(*rank_high, step.spacetime.max_rank());
      TTVector deriv = tt_round(tt_slice_front(step.state, 0),
                                {opts.solver.truncation_eps, 0});
      grad(n, k) = std::real(tt_dot(lambda, deriv));
    }
    if (n > 0) {
      // The costate runs the adjoint flow, which is the flow of the negated
      // generator.
      StepResult back = tamen_step(op_scale(Complex(-1.0), gen), lambda, tau,
                                   opts);
      if (!back.solve.converged)
        throw std::runtime_error("grape: costate solve did not converge");
      if (rank_high)
        *rank_high = std::max(*rank_high, back.spacetime.max_rank());
      lambda = std::move(back.state);
    }
  }
  return grad;
}

}  // namespace

double state_fidelity(const TTVector& target, const TTVector& rho) {
  return std::real(tt_dot(target, rho));
}

PropagateResult propagate_pulses(const LiouvilleModel& model,
                                 const RealMatrix& pulses, const TTVector& rho0,
                                 double tau, const TamenOptions& opts) {
  return propagate(
      [&](int n) {
        return interval_generator(model, pulses.row(n).transpose());
      },
      static_cast<int>(pulses.rows()), rho0, tau, opts);
}

RealMatrix grape_gradient(const LiouvilleModel& model, const RealMatrix& pulses,
                          const TTVector& rho0, const TTVector& target,
                          double tau, const TamenOptions& opts) {
  if (pulses.cols() != static_cast<Eigen::Index>(model.control_ops.size()))
    throw std::invalid_argument("grape_gradient: channel count mismatch");
  ForwardPass fp = eval_forward(model, pulses, rho0, target, tau, opts);
  return gradient_from(model, pulses, fp.states, target, tau, opts);
}

GrapeResult grape_optimize(
    const LiouvilleModel& model, const RealMatrix& pulses0,
    const TTVector& rho0, const TTVector& target, double tau,
    const GrapeOptions& opts,
    const std::function<void(const GrapeIterate&)>& on_iterate) {
  if (pulses0.cols() != static_cast<Eigen::Index>(model.control_ops.size()))
    throw std::invalid_argument("grape_optimize: channel count mismatch");
  if (opts.max_iters < 0 || opts.initial_step <= 0.0 || opts.grow <= 1.0 ||
      opts.shrink <= 0.0 || opts.shrink >= 1.0)
    throw std::invalid_argument("grape_optimize: bad options");

  GrapeResult res;
  res.pulses = pulses0;
  ForwardPass cur = eval_forward(model, pulses0, rho0, target, tau, opts.step);
  res.fidelity = cur.fidelity;
  double rate = opts.initial_step;
  const auto t0 = std::chrono::steady_clock::now();

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    if (opts.deadline_seconds > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count() >= opts.deadline_seconds) {
      res.reason = GrapeStop::deadline;
      break;
    }
    int rank_high = cur.max_rank;
    RealMatrix grad = gradient_from(model, res.pulses, cur.states, target, tau,
                                    opts.step, &rank_high);
    const double gnorm = grad.norm();
    if (gnorm == 0.0) {
      res.reason = GrapeStop::stalled;
      break;
    }

    GrapeIterate it;
    it.iter = iter;
    it.grad_norm = gnorm;
    while (rate >= opts.min_step) {
      RealMatrix trial = res.pulses + rate * grad;
      bool evaluated = true;
      ForwardPass fp;
      try {
        fp = eval_forward(model, trial, rho0, target, tau, opts.step);
      } catch (const std::runtime_error&) {
        evaluated = false;  // unsolvable trial counts as a rejection
      }
      if (evaluated) rank_high = std::max(rank_high, fp.max_rank);
      if (evaluated && fp.fidelity > cur.fidelity) {
        res.pulses = std::move(trial);
        cur = std::move(fp);
        it.step_size = rate;
        rate *= opts.grow;
        it.accepted = true;
        break;
      }
      ++it.rejections;
      rate *= opts.shrink;
    }

    it.fidelity = cur.fidelity;
    it.max_rank = rank_high;
    res.iterations = iter;
    res.fidelity = cur.fidelity;
    res.trace.push_back(it);
    if (on_iterate) on_iterate(it);

    if (!it.accepted) {
      res.reason = GrapeStop::step_underflow;
      break;
    }
    if (1.0 - cur.fidelity <= opts.target_infidelity) {
      res.reason = GrapeStop::target_reached;
      break;
    }
  }
  return res;
}

}  // namespace ttqc
