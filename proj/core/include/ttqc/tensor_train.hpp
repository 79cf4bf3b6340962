#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace ttqc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;
using StridedMap = Eigen::Map<Matrix, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;

// Relative Frobenius truncation target for a whole tensor.  Rounding spreads
// eps over the bonds as eps/sqrt(D-1) so that discarded pieces, which are
// mutually orthogonal, add up below eps * |x|.  max_rank == 0 means unbounded.
struct TruncationPolicy {
  double eps = 1e-10;
  int max_rank = 0;
};

struct RoundReport {
  double error_bound = 0.0;  // upper bound on |x - round(x)| / |x|
  int max_rank = 0;          // largest bond rank of the result
  bool rank_capped = false;  // true if max_rank forced a worse error than eps
};

// Order-3 core with dimensions (left, mode, right).  Storage is one flat
// column-major buffer with the left index fastest, so both standard
// unfoldings are zero-copy views:
//   vfold : (left*mode) x right
//   hfold : left x (mode*right)
class TTBlock {
 public:
  TTBlock() = default;
  TTBlock(int left, int mode, int right);

  int left() const { return left_; }
  int mode() const { return mode_; }
  int right() const { return right_; }
  std::int64_t size() const { return static_cast<std::int64_t>(buf_.size()); }

  Complex& at(int a, int i, int b);
  const Complex& at(int a, int i, int b) const;

  MatrixMap vfold();
  ConstMatrixMap vfold() const;
  MatrixMap hfold();
  ConstMatrixMap hfold() const;
  // (left x right) view of the slice with the mode index fixed.
  StridedMap mode_slice(int i);
  ConstStridedMap mode_slice(int i) const;

  Complex* data() { return buf_.data(); }
  const Complex* data() const { return buf_.data(); }

  static TTBlock from_vfold(const Matrix& m, int left, int mode, int right);
  static TTBlock from_hfold(const Matrix& m, int left, int mode, int right);

 private:
  int left_ = 0;
  int mode_ = 0;
  int right_ = 0;
  std::vector<Complex> buf_;
};

// Order-4 operator core with dimensions (left, row_mode, col_mode, right),
// flat column-major with the left index fastest.  fold() is the zero-copy
// (left*row_mode*col_mode) x right view used when treating the operator as a
// plain tensor train over the fused mode s + row_mode * t.
class TTOpBlock {
 public:
  TTOpBlock() = default;
  TTOpBlock(int left, int row_mode, int col_mode, int right);

  int left() const { return left_; }
  int row_mode() const { return row_; }
  int col_mode() const { return col_; }
  int right() const { return right_; }

  Complex& at(int a, int s, int t, int b);
  const Complex& at(int a, int s, int t, int b) const;

  MatrixMap fold();
  ConstMatrixMap fold() const;
  // (left x right) view of the slice with both mode indices fixed.
  StridedMap pair_slice(int s, int t);
  ConstStridedMap pair_slice(int s, int t) const;

 private:
  int left_ = 0;
  int row_ = 0;
  int col_ = 0;
  int right_ = 0;
  std::vector<Complex> buf_;
};

// Tensor train with boundary ranks 1.  Orthogonality bookkeeping: blocks
// [0, left_ortho) are left-orthogonal, blocks [order - right_ortho, order)
// are right-orthogonal.  Mutating block k through the non-const accessor
// shrinks both counts to what the mutation can preserve.
class TTVector {
 public:
  TTVector() = default;
  explicit TTVector(std::vector<TTBlock> blocks);

  int order() const { return static_cast<int>(blocks_.size()); }
  int mode(int k) const { return blocks_[k].mode(); }
  // Bond rank after block k-1; rank(0) == rank(order()) == 1.
  int rank(int k) const;
  int max_rank() const;
  std::vector<int> modes() const;
  std::int64_t numel() const;

  const TTBlock& block(int k) const { return blocks_[k]; }
  TTBlock& block(int k);

  int left_ortho() const { return left_ortho_; }
  int right_ortho() const { return right_ortho_; }
  void mark_ortho(int left_count, int right_count);

 private:
  std::vector<TTBlock> blocks_;
  int left_ortho_ = 0;
  int right_ortho_ = 0;
};

class TTOperator {
 public:
  TTOperator() = default;
  explicit TTOperator(std::vector<TTOpBlock> blocks);

  int order() const { return static_cast<int>(blocks_.size()); }
  int row_mode(int k) const { return blocks_[k].row_mode(); }
  int col_mode(int k) const { return blocks_[k].col_mode(); }
  int rank(int k) const;
  int max_rank() const;
  std::vector<int> row_modes() const;
  std::vector<int> col_modes() const;

  const TTOpBlock& block(int k) const { return blocks_[k]; }
  TTOpBlock& block(int k) { return blocks_[k]; }

 private:
  std::vector<TTOpBlock> blocks_;
};

// Construction.
TTVector tt_zero(const std::vector<int>& modes);
TTVector tt_random(const std::vector<int>& modes, const std::vector<int>& ranks,
                   std::mt19937_64& rng);
TTVector tt_from_dense(const Vector& x, const std::vector<int>& modes,
                       const TruncationPolicy& policy);

// Dense bridges index tensors big-endian: the first mode is the most
// significant digit, matching the Kronecker product order of the factors.
Vector tt_dense(const TTVector& x);
Matrix op_dense(const TTOperator& a);

// Linear algebra.  axpy and apply are exact; ranks add or multiply.
Complex tt_dot(const TTVector& a, const TTVector& b);  // <a, b>, conjugates a
double tt_norm(const TTVector& x);
TTVector tt_scale(Complex s, const TTVector& x);
TTVector tt_axpy(Complex alpha, const TTVector& x, const TTVector& y);
TTVector tt_apply(const TTOperator& a, const TTVector& x);

// Gauge and compression.
TTVector orthogonalize(const TTVector& x, int pivot);
TTVector tt_round(const TTVector& x, const TruncationPolicy& policy,
                  RoundReport* report = nullptr);

// Operator arithmetic.
TTOperator op_identity(const std::vector<int>& modes);
TTOperator op_scale(Complex s, const TTOperator& a);
TTOperator op_axpy(Complex alpha, const TTOperator& a, const TTOperator& b);
TTOperator op_round(const TTOperator& a, const TruncationPolicy& policy);

// Mode surgery.
TTVector tt_prepend_block(const TTVector& x, const TTBlock& head);
TTVector tt_append_block(const TTVector& x, const TTBlock& tail);
TTOperator op_prepend_block(const TTOperator& a, const TTOpBlock& head);
TTOperator op_append_block(const TTOperator& a, const TTOpBlock& tail);
// Contract the first (last) mode with a weight vector, dropping that mode.
TTVector tt_contract_front(const TTVector& x, const Vector& weights);
TTVector tt_contract_back(const TTVector& x, const Vector& weights);
TTVector tt_slice_front(const TTVector& x, int index);
TTVector tt_slice_back(const TTVector& x, int index);

// Galerkin reduction of A x = f onto the rank-one-connected frame around
// block k of x: returns the dense local matrix B = P' A P and local right
// hand side g = P' f, where P is the interpolation from block k's entries to
// the full tensor defined by the other blocks of x.  Requires x orthogonal
// around k (left_ortho >= k, right_ortho >= order - 1 - k).
struct ReducedSystem {
  Matrix matrix;
  Vector rhs;
};
ReducedSystem frame_reduce(const TTOperator& a, const TTVector& f,
                           const TTVector& x, int k);

}  // namespace ttqc
