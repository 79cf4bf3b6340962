#pragma once

#include "ttqc/tensor_train.hpp"

namespace ttqc {

// Spectral collocation in time over one step [0, tau] on Chebyshev-Gauss-
// Lobatto nodes t_m = tau (1 - cos(m pi / M)) / 2, m = 0..M.  The value at
// t_0 = 0 is known, so the unknowns are the M values at t_1..t_M and the
// initial value moves to the right-hand side:
//   sum_j S[m,j] x(t_j) - rhs_weights[m] x(0) = x'(t_m),  m = 1..M.
// Rows of the full differentiation matrix sum to zero by construction, so
// rhs_weights equals S * 1 exactly.
struct SpectralGrid {
  int order = 8;  // M, between 1 and 16; M = 1 degenerates to implicit Euler
  double tau = 0.0;
  RealVector nodes;             // all M+1 nodes, nodes(0) = 0, nodes(M) = tau
  RealMatrix diff;              // S, M x M, acting on values at t_1..t_M
  RealVector rhs_weights;       // S * 1 = -D[1:,0]
  // Lagrange weights that evaluate the degree-(M-1) interpolant through
  // {t_0..t_{M-1}} at t_M; entry 0 belongs to the initial value.  The gap
  // between that extrapolation and the computed value at t_M estimates the
  // time-discretization error.
  RealVector endpoint_weights;
};

SpectralGrid build_grid(int order, double tau);

// All-node collocation of dx/dt = -i gen x as one linear space-time train:
//   (S (x) I + I_M (x) i gen) xbar = rhs_weights (x) x0,
// with the time index appended as the last mode (size M, node m stored at
// index m-1).
struct TimeSystem {
  TTOperator op;
  TTVector rhs;
};

TimeSystem assemble_time_system(const TTOperator& gen, const TTVector& x0,
                                const SpectralGrid& grid);

}  // namespace ttqc
