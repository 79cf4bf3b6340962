#include "dense_util.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace ttqc::detail {

QrSplit qr_split(const Matrix& m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  const int k = std::min(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(m);
  QrSplit out;
  out.q = qr.householderQ() * Matrix::Identity(rows, k);
  out.r = qr.matrixQR().topRows(k).template triangularView<Eigen::Upper>();
  return out;
}

LqSplit lq_split(const Matrix& m) {
  QrSplit qr = qr_split(m.adjoint());
  LqSplit out;
  out.l = qr.r.adjoint();
  out.q = qr.q.adjoint();
  return out;
}

SvdSplit svd_split(const Matrix& m, double abs_tol, int max_rank) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const int n = static_cast<int>(sigma.size());

  SvdSplit out;
  if (n == 0 || sigma(0) <= 0.0) {
    // Degenerate or zero matrix: keep a single unit direction so the chain
    // stays well formed.
    out.rank = 1;
    out.u = Matrix::Zero(m.rows(), 1);
    if (m.rows() > 0) out.u(0, 0) = 1.0;
    out.sv = Matrix::Zero(1, m.cols());
    return out;
  }

  // tail_sq(r) = sum of squared singular values beyond rank r.
  std::vector<double> tail_sq(n + 1, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    tail_sq[i] = tail_sq[i + 1] + sigma(i) * sigma(i);
  }
  int rank = n;
  const double tol_sq = abs_tol * abs_tol;
  while (rank > 1 && tail_sq[rank - 1] <= tol_sq) --rank;
  if (max_rank > 0 && rank > max_rank) {
    rank = max_rank;
    out.capped = true;
  }
  out.rank = rank;
  out.discarded_sq = tail_sq[rank];
  out.u = svd.matrixU().leftCols(rank);
  out.sv = sigma.head(rank).asDiagonal() * svd.matrixV().leftCols(rank).adjoint();
  return out;
}

}  // namespace ttqc::detail
