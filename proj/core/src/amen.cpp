#include "ttqc/amen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/LU>

#include "contraction_kernels.hpp"
#include "dense_util.hpp"
#include "gmres.hpp"

namespace ttqc {

namespace {

using detail::OpEnv;
using detail::VecEnv;

// Sweep state for one amen_solve call.  x is kept in mixed canonical form
// with the pivot at the active site; the eight environment chains cache the
// contractions of (x, A, x), (x, f), (z, A, x) and (z, f) from both ends.
class Sweeper {
 public:
  Sweeper(const TTOperator& a, const TTVector& f, const TTVector& x0,
          const SolverOptions& opts)
      : a_(a), f_(f), opts_(opts), d_(f.order()) {
    x_ = orthogonalize(x0, 0);
    use_z_ = opts_.enrich_rank > 0 && d_ > 1;
    if (use_z_) {
      TTVector resid = tt_axpy(Complex(-1.0), tt_apply(a_, x_), f_);
      z_ = tt_round(resid, {opts_.truncation_eps, opts_.enrich_rank});
      z_ = orthogonalize(z_, 0);
    }
    la_.assign(d_ + 1, detail::op_env_unit());
    ra_.assign(d_ + 1, detail::op_env_unit());
    lf_.assign(d_ + 1, detail::vec_env_unit());
    rf_.assign(d_ + 1, detail::vec_env_unit());
    if (use_z_) {
      lza_.assign(d_ + 1, detail::op_env_unit());
      rza_.assign(d_ + 1, detail::op_env_unit());
      lzf_.assign(d_ + 1, detail::vec_env_unit());
      rzf_.assign(d_ + 1, detail::vec_env_unit());
    }
    for (int k = d_ - 1; k >= 1; --k) push_right_envs(k);
  }

  double forward() {
    double worst = 0.0;
    for (int k = 0; k < d_; ++k) {
      double pre = 0.0;
      TTBlock v = solve_site(k, &pre);
      worst = std::max(worst, pre);
      if (k < d_ - 1) {
        move_right(k, v);
      } else {
        x_.block(k) = v;
      }
    }
    return worst;
  }

  // Returns the sweep convergence measure: the worst local residual seen,
  // combined with the norm of the refreshed residual train.  Local residuals
  // alone only certify stationarity of the alternating scheme; the z train
  // supplies the global estimate that distinguishes stagnation from
  // convergence.
  double backward(double fnorm) {
    double worst = 0.0;
    for (int k = d_ - 1; k >= 0; --k) {
      double pre = 0.0;
      TTBlock v = solve_site(k, &pre);
      worst = std::max(worst, pre);
      if (k > 0) {
        move_left(k, v);
      } else {
        x_.block(k) = v;
        if (use_z_) {
          TTBlock zr = detail::local_rhs(lzf_[k], f_.block(k), rzf_[k + 1]);
          TTBlock za =
              detail::local_matvec(lza_[k], a_.block(k), rza_[k + 1], v);
          z_.block(k) = TTBlock::from_vfold(zr.vfold() - za.vfold(),
                                            zr.left(), zr.mode(), zr.right());
          // Blocks 1..d-1 of z have orthonormal rows after the sweep, so the
          // train norm is the head block's norm.
          worst = std::max(worst, zb(0).vfold().norm() / fnorm);
        }
      }
    }
    return worst;
  }

  TTVector take() {
    x_.mark_ortho(0, d_ - 1);
    return std::move(x_);
  }

  const TTVector& x() const { return x_; }

 private:
  const TTBlock& xb(int k) const { return std::as_const(x_).block(k); }
  const TTBlock& zb(int k) const { return std::as_const(z_).block(k); }

  void push_right_envs(int k) {
    ra_[k] = detail::op_env_push_right(ra_[k + 1], xb(k), a_.block(k), xb(k));
    rf_[k] = detail::vec_env_push_right(rf_[k + 1], xb(k), f_.block(k));
    if (use_z_) {
      rza_[k] =
          detail::op_env_push_right(rza_[k + 1], zb(k), a_.block(k), xb(k));
      rzf_[k] = detail::vec_env_push_right(rzf_[k + 1], zb(k), f_.block(k));
    }
  }

  void push_left_envs(int k) {
    la_[k + 1] = detail::op_env_push_left(la_[k], xb(k), a_.block(k), xb(k));
    lf_[k + 1] = detail::vec_env_push_left(lf_[k], xb(k), f_.block(k));
    if (use_z_) {
      lza_[k + 1] =
          detail::op_env_push_left(lza_[k], zb(k), a_.block(k), xb(k));
      lzf_[k + 1] = detail::vec_env_push_left(lzf_[k], zb(k), f_.block(k));
    }
  }

  // Solves the frame-reduced system at site k, warm-started from the current
  // block.  *pre receives the relative residual of the block as found, which
  // is the convergence measure: once every site enters below tolerance the
  // iterate is converged and the solves are skipped.
  TTBlock solve_site(int k, double* pre) {
    const TTBlock& cur = xb(k);
    Vector g = detail::block_vec(
        detail::local_rhs(lf_[k], f_.block(k), rf_[k + 1]));
    auto apply = [&](const Vector& t) {
      TTBlock tb =
          detail::block_from_vec(t, cur.left(), cur.mode(), cur.right());
      return detail::block_vec(
          detail::local_matvec(la_[k], a_.block(k), ra_[k + 1], tb));
    };
    Vector v = detail::block_vec(cur);
    const double gnorm = g.norm();
    const double denom = gnorm > 0.0 ? gnorm : 1.0;
    *pre = (g - apply(v)).norm() / denom;
    if (*pre > 0.3 * opts_.tolerance) {
      if (v.size() <= opts_.dense_direct_max) {
        Matrix b = detail::local_dense(la_[k], a_.block(k), ra_[k + 1]);
        v = Eigen::PartialPivLU<Matrix>(b).solve(g);
      } else {
        Vector inv;
        std::function<Vector(const Vector&)> precond;
        if (opts_.precondition) {
          Vector diag = detail::local_diag(la_[k], a_.block(k), ra_[k + 1]);
          const double dmax = diag.cwiseAbs().maxCoeff();
          inv.resize(diag.size());
          for (Eigen::Index i = 0; i < diag.size(); ++i) {
            const bool ok = std::abs(diag(i)) > 1e-12 * dmax;
            inv(i) = ok ? 1.0 / diag(i) : Complex(1.0, 0.0);
          }
          precond = [&inv](const Vector& t) -> Vector {
            return inv.cwiseProduct(t);
          };
        }
        detail::GmresOptions go;
        go.rtol = std::max(opts_.local_rtol, 0.3 * opts_.tolerance);
        go.max_iters = opts_.local_max_iters;
        go.restart = opts_.gmres_restart;
        detail::gmres(apply, precond, g, v, go);
      }
    }
    return detail::block_from_vec(v, cur.left(), cur.mode(), cur.right());
  }

  // Accepts the solved block at site k, expands the bond to the right with
  // the projected-residual basis, orthogonalizes, and absorbs the remainder
  // into site k+1.  Requires k < d-1.
  void move_right(int k, const TTBlock& v) {
    const int r_old = v.right();
    Matrix u = v.vfold();
    Matrix aug;
    TTBlock zeta;
    if (use_z_) {
      TTBlock w = detail::local_rhs(lf_[k], f_.block(k), rzf_[k + 1]);
      TTBlock wa = detail::local_matvec(la_[k], a_.block(k), rza_[k + 1], v);
      Matrix wm = w.vfold() - wa.vfold();
      aug.resize(u.rows(), u.cols() + wm.cols());
      aug << u, wm;
      TTBlock zr = detail::local_rhs(lzf_[k], f_.block(k), rzf_[k + 1]);
      TTBlock za = detail::local_matvec(lza_[k], a_.block(k), rza_[k + 1], v);
      zeta = TTBlock::from_vfold(zr.vfold() - za.vfold(), zr.left(), zr.mode(),
                                 zr.right());
    } else {
      aug = u;
    }

    detail::QrSplit qr = detail::qr_split(aug);
    const int r_new = static_cast<int>(qr.q.cols());
    const TTBlock& nb = xb(k + 1);
    Matrix absorbed = qr.r.leftCols(r_old) * nb.hfold();
    const int nb_mode = nb.mode();
    const int nb_right = nb.right();
    x_.block(k) = TTBlock::from_vfold(qr.q, v.left(), v.mode(), r_new);
    x_.block(k + 1) =
        TTBlock::from_hfold(absorbed, r_new, nb_mode, nb_right);

    if (use_z_) {
      detail::QrSplit zqr = detail::qr_split(zeta.vfold());
      const int zr_new = static_cast<int>(zqr.q.cols());
      const TTBlock& zn = zb(k + 1);
      Matrix zabs = zqr.r * zn.hfold();
      const int zn_mode = zn.mode();
      const int zn_right = zn.right();
      z_.block(k) =
          TTBlock::from_vfold(zqr.q, zeta.left(), zeta.mode(), zr_new);
      z_.block(k + 1) = TTBlock::from_hfold(zabs, zr_new, zn_mode, zn_right);
    }
    push_left_envs(k);
  }

  // Mirror of move_right: truncates the left bond of site k by SVD, expands
  // it with residual rows, and absorbs the carry into site k-1.  Requires
  // k > 0.
  void move_left(int k, const TTBlock& v) {
    const double vnorm = v.vfold().norm();
    const double abs_tol =
        opts_.truncation_eps * vnorm / std::sqrt(static_cast<double>(d_ - 1));
    detail::SvdSplit sp =
        detail::svd_split(v.hfold().adjoint(), abs_tol, opts_.max_rank);
    Matrix rows = sp.u.adjoint();     // sp.rank x (mode*right), orthonormal
    Matrix carry = sp.sv.adjoint();   // left x sp.rank

    Matrix q;
    Matrix into;
    if (use_z_) {
      TTBlock w = detail::local_rhs(lzf_[k], f_.block(k), rf_[k + 1]);
      TTBlock wa = detail::local_matvec(lza_[k], a_.block(k), ra_[k + 1], v);
      Matrix wm = w.hfold() - wa.hfold();
      Matrix aug(rows.rows() + wm.rows(), rows.cols());
      aug << rows, wm;
      detail::LqSplit lq = detail::lq_split(aug);
      q = lq.q;
      into = carry * lq.l.topRows(sp.rank);
    } else {
      q = rows;
      into = carry;
    }
    const int r_new = static_cast<int>(q.rows());
    const TTBlock& pb = xb(k - 1);
    Matrix prev = pb.vfold() * into;
    const int pb_left = pb.left();
    const int pb_mode = pb.mode();
    x_.block(k) = TTBlock::from_hfold(q, r_new, v.mode(), v.right());
    x_.block(k - 1) = TTBlock::from_vfold(prev, pb_left, pb_mode, r_new);

    if (use_z_) {
      TTBlock zr = detail::local_rhs(lzf_[k], f_.block(k), rzf_[k + 1]);
      TTBlock za = detail::local_matvec(lza_[k], a_.block(k), rza_[k + 1], v);
      Matrix zeta = zr.hfold() - za.hfold();
      detail::LqSplit zlq = detail::lq_split(zeta);
      const int zr_new = static_cast<int>(zlq.q.rows());
      const TTBlock& zp = zb(k - 1);
      Matrix zprev = zp.vfold() * zlq.l;
      const int zp_left = zp.left();
      const int zp_mode = zp.mode();
      z_.block(k) = TTBlock::from_hfold(zlq.q, zr_new, zr.mode(), zr.right());
      z_.block(k - 1) = TTBlock::from_vfold(zprev, zp_left, zp_mode, zr_new);
    }
    push_right_envs(k);
  }

  const TTOperator& a_;
  const TTVector& f_;
  SolverOptions opts_;
  int d_ = 0;
  bool use_z_ = false;
  TTVector x_;
  TTVector z_;
  std::vector<OpEnv> la_, ra_, lza_, rza_;
  std::vector<VecEnv> lf_, rf_, lzf_, rzf_;
};

}  // namespace

TTVector amen_solve(const TTOperator& a, const TTVector& f, const TTVector& x0,
                    const SolverOptions& opts, SolveReport* report) {
  const int d = f.order();
  if (a.order() != d || x0.order() != d)
    throw std::invalid_argument("amen_solve: order mismatch");
  for (int k = 0; k < d; ++k) {
    if (a.row_mode(k) != f.mode(k) || a.col_mode(k) != x0.mode(k))
      throw std::invalid_argument("amen_solve: mode mismatch");
  }
  if (opts.tolerance <= 0.0 || opts.max_sweeps < 1)
    throw std::invalid_argument("amen_solve: bad options");

  SolveReport rep;
  const double fnorm = tt_norm(f);
  if (fnorm == 0.0) {
    rep.converged = true;
    if (opts.certify) rep.certified = 0.0;
    if (report) *report = rep;
    return tt_zero(x0.modes());
  }

  Sweeper sweeper(a, f, x0, opts);
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    sweeper.forward();
    const double res = sweeper.backward(fnorm);
    rep.sweeps = sweep;
    rep.residual = res;
    rep.history.push_back({sweep, res, sweeper.x().max_rank()});
    if (res <= opts.tolerance) {
      rep.converged = true;
      break;
    }
  }
  TTVector x = sweeper.take();
  if (opts.certify) {
    TTVector resid = tt_axpy(Complex(-1.0), tt_apply(a, x), f);
    rep.certified = tt_norm(resid) / fnorm;
  }
  if (report) *report = rep;
  return x;
}

StepResult tamen_step(const TTOperator& gen, const TTVector& state, double tau,
                      const TamenOptions& opts) {
  SpectralGrid grid = build_grid(opts.time_order, tau);
  TimeSystem sys = assemble_time_system(gen, state, grid);
  const int m = grid.order;

  TTBlock ones(1, m, 1);
  for (int i = 0; i < m; ++i) ones.at(0, i, 0) = Complex(1.0, 0.0);
  TTVector guess = tt_append_block(state, ones);

  StepResult out;
  out.spacetime = amen_solve(sys.op, sys.rhs, guess, opts.solver, &out.solve);

  TruncationPolicy policy{opts.solver.truncation_eps, opts.solver.max_rank};
  out.state = tt_round(tt_slice_back(out.spacetime, m - 1), policy);

  // Interpolant through the initial value and the interior nodes, evaluated
  // at the endpoint; the defect against the computed endpoint estimates the
  // time-discretization error.
  Vector wt = Vector::Zero(m);
  for (int j = 1; j < m; ++j) wt(j - 1) = grid.endpoint_weights(j);
  TTVector interp = tt_axpy(Complex(grid.endpoint_weights(0)), state,
                            tt_contract_back(out.spacetime, wt));
  const double enorm = tt_norm(out.state);
  const double defect = tt_norm(tt_axpy(Complex(-1.0), out.state, interp));
  out.err_est = enorm > 0.0 ? defect / enorm : defect;

  const double nin = tt_norm(state);
  if (nin > 0.0) {
    out.norm_drift = std::abs(enorm - nin) / nin;
    if (opts.conserve) {
      if (out.norm_drift > opts.max_norm_drift || enorm == 0.0)
        throw std::runtime_error("tamen_step: norm drift exceeds tolerance");
      out.state = tt_scale(Complex(nin / enorm), out.state);
    }
  }
  return out;
}

PropagateResult propagate(const std::function<TTOperator(int)>& gen_at,
                          int intervals, const TTVector& rho0, double tau,
                          const TamenOptions& opts) {
  if (intervals < 0) throw std::invalid_argument("propagate: bad intervals");
  PropagateResult out;
  out.state = rho0;
  out.err_est.reserve(intervals);
  out.norm_drift.reserve(intervals);
  out.max_rank.reserve(intervals);
  for (int n = 0; n < intervals; ++n) {
    StepResult step = tamen_step(gen_at(n), out.state, tau, opts);
    out.state = std::move(step.state);
    out.err_est.push_back(step.err_est);
    out.norm_drift.push_back(step.norm_drift);
    out.max_rank.push_back(step.spacetime.max_rank());
    if (!step.solve.converged) return out;
  }
  out.completed = true;
  return out;
}

}  // namespace ttqc
