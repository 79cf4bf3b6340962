#include "ttqc/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace ttqc {

SpectralGrid build_grid(int order, double tau) {
  if (order < 1 || order > 16)
    throw std::invalid_argument("build_grid: order must be in 1..16");
  if (!(tau > 0.0)) throw std::invalid_argument("build_grid: tau must be positive");

  const int m = order;
  SpectralGrid g;
  g.order = m;
  g.tau = tau;
  g.nodes = RealVector(m + 1);
  for (int j = 0; j <= m; ++j)
    g.nodes(j) = tau * (1.0 - std::cos(M_PI * j / m)) / 2.0;

  // Barycentric weights of the Gauss-Lobatto family; the affine-map factor
  // common to all of them cancels in the quotients below.
  RealVector w(m + 1);
  for (int j = 0; j <= m; ++j)
    w(j) = ((j % 2 == 0) ? 1.0 : -1.0) * ((j == 0 || j == m) ? 0.5 : 1.0);

  RealMatrix d = RealMatrix::Zero(m + 1, m + 1);
  for (int i = 0; i <= m; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j <= m; ++j) {
      if (i == j) continue;
      d(i, j) = (w(j) / w(i)) / (g.nodes(i) - g.nodes(j));
      row_sum += d(i, j);
    }
    d(i, i) = -row_sum;
  }

  g.diff = d.block(1, 1, m, m);
  g.rhs_weights = -d.block(1, 0, m, 1);

  g.endpoint_weights = RealVector(m);
  for (int j = 0; j < m; ++j) {
    double c = 1.0;
    for (int k = 0; k < m; ++k) {
      if (k == j) continue;
      c *= (g.nodes(m) - g.nodes(k)) / (g.nodes(j) - g.nodes(k));
    }
    g.endpoint_weights(j) = c;
  }
  return g;
}

TimeSystem assemble_time_system(const TTOperator& gen, const TTVector& x0,
                                const SpectralGrid& grid) {
  if (gen.row_modes() != x0.modes() || gen.col_modes() != x0.modes())
    throw std::invalid_argument("assemble_time_system: mode mismatch");
  const int m = grid.order;

  TTOpBlock time_diff(1, m, m, 1);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) time_diff.at(0, i, j, 0) = grid.diff(i, j);
  TTOpBlock time_eye(1, m, m, 1);
  for (int i = 0; i < m; ++i) time_eye.at(0, i, i, 0) = 1.0;

  TTOperator deriv_part =
      op_append_block(op_identity(x0.modes()), time_diff);
  TTOperator gen_part =
      op_append_block(op_scale(Complex(0.0, 1.0), gen), time_eye);

  TTBlock time_rhs(1, m, 1);
  for (int i = 0; i < m; ++i) time_rhs.at(0, i, 0) = grid.rhs_weights(i);

  TimeSystem sys;
  sys.op = op_axpy(Complex(1.0, 0.0), deriv_part, gen_part);
  sys.rhs = tt_append_block(x0, time_rhs);
  return sys;
}

}  // namespace ttqc
