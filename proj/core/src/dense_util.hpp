#pragma once

#include "ttqc/tensor_train.hpp"

namespace ttqc::detail {

// Thin QR: m = q * r with q having orthonormal columns, rank = min(rows, cols).
struct QrSplit {
  Matrix q;
  Matrix r;
};
QrSplit qr_split(const Matrix& m);

// Thin LQ: m = l * q with q having orthonormal rows.
struct LqSplit {
  Matrix l;
  Matrix q;
};
LqSplit lq_split(const Matrix& m);

// Truncated SVD split m ~= u * sv with |m - u*sv|_F <= sqrt(discarded_sq).
// Keeps the smallest rank whose tail is below abs_tol, at least 1, at most
// max_rank when max_rank > 0.  capped reports that the rank cap, not the
// tolerance, decided the rank.
struct SvdSplit {
  Matrix u;
  Matrix sv;
  int rank = 0;
  double discarded_sq = 0.0;
  bool capped = false;
};
SvdSplit svd_split(const Matrix& m, double abs_tol, int max_rank);

}  // namespace ttqc::detail
