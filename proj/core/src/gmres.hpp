#pragma once

#include <functional>

#include "ttqc/tensor_train.hpp"

namespace ttqc::detail {

struct GmresOptions {
  double rtol = 1e-10;
  int max_iters = 400;
  int restart = 50;
};

struct GmresResult {
  int iterations = 0;
  double residual = 0.0;  // relative to |b|
  bool converged = false;
};

// Restarted GMRES with optional right preconditioning; x carries the warm
// start in and the solution out.
GmresResult gmres(const std::function<Vector(const Vector&)>& apply_op,
                  const std::function<Vector(const Vector&)>& apply_precond,
                  const Vector& b, Vector& x, const GmresOptions& opts);

}  // namespace ttqc::detail
