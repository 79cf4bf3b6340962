#include "gmres.hpp"

#include <cmath>

namespace ttqc::detail {

namespace {

// Complex Givens rotation zeroing b against a: returns (c, s) with c real,
// [c s; -conj(s) c] [a; b] = [phase(a) * r; 0].
void make_rotation(Complex a, Complex b, double& c, Complex& s) {
  const double r = std::sqrt(std::norm(a) + std::norm(b));
  if (r == 0.0) {
    c = 1.0;
    s = Complex(0.0, 0.0);
    return;
  }
  const Complex phase =
      (a == Complex(0.0, 0.0)) ? Complex(1.0, 0.0) : a / std::abs(a);
  c = std::abs(a) / r;
  s = phase * std::conj(b) / r;
}

}  // namespace

GmresResult gmres(const std::function<Vector(const Vector&)>& apply_op,
                  const std::function<Vector(const Vector&)>& apply_precond,
                  const Vector& b, Vector& x, const GmresOptions& opts) {
  const Eigen::Index n = b.size();
  if (x.size() != n) x = Vector::Zero(n);

  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  const double target = opts.rtol * bnorm;
  const int restart = std::max(1, std::min<int>(opts.restart, static_cast<int>(n)));

  auto precond = [&](const Vector& v) -> Vector {
    return apply_precond ? apply_precond(v) : v;
  };

  Vector r = b - apply_op(x);
  double beta = r.norm();
  res.residual = beta / bnorm;
  if (beta <= target) {
    res.converged = true;
    return res;
  }

  Matrix v(n, restart + 1);
  Matrix h(restart + 1, restart);
  Eigen::VectorXd cs(restart);
  Vector sn(restart), g(restart + 1);

  while (res.iterations < opts.max_iters) {
    v.col(0) = r / beta;
    g.setZero();
    g(0) = beta;

    int j = 0;
    bool breakdown = false;
    for (; j < restart && res.iterations < opts.max_iters;) {
      Vector w = apply_op(precond(v.col(j)));
      // Modified Gram-Schmidt with one refinement pass.
      for (int i = 0; i <= j; ++i) {
        const Complex hij = v.col(i).dot(w);
        h(i, j) = hij;
        w -= hij * v.col(i);
      }
      for (int i = 0; i <= j; ++i) {
        const Complex corr = v.col(i).dot(w);
        h(i, j) += corr;
        w -= corr * v.col(i);
      }
      const double wnorm = w.norm();
      h(j + 1, j) = wnorm;
      if (wnorm > 0.0) {
        v.col(j + 1) = w / wnorm;
      } else {
        breakdown = true;
      }

      for (int i = 0; i < j; ++i) {
        const Complex t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j) = -std::conj(sn(i)) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j) = t;
      }
      make_rotation(h(j, j), h(j + 1, j), cs(j), sn(j));
      h(j, j) = cs(j) * h(j, j) + sn(j) * h(j + 1, j);
      h(j + 1, j) = 0.0;
      const Complex t = cs(j) * g(j) + sn(j) * g(j + 1);
      g(j + 1) = -std::conj(sn(j)) * g(j) + cs(j) * g(j + 1);
      g(j) = t;

      ++j;
      ++res.iterations;
      if (std::abs(g(j)) <= target || breakdown) break;
    }

    // Back-substitute the leading j x j triangular system.
    Vector y = Vector::Zero(j);
    for (int i = j - 1; i >= 0; --i) {
      Complex s = g(i);
      for (int k = i + 1; k < j; ++k) s -= h(i, k) * y(k);
      y(i) = s / h(i, i);
    }
    Vector update = Vector::Zero(n);
    for (int i = 0; i < j; ++i) update += y(i) * v.col(i);
    x += precond(update);

    r = b - apply_op(x);
    beta = r.norm();
    res.residual = beta / bnorm;
    if (beta <= target) {
      res.converged = true;
      return res;
    }
    if (breakdown || j == 0) break;
  }
  return res;
}

}  // namespace ttqc::detail
