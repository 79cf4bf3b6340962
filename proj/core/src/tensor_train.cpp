#include "ttqc/tensor_train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "contraction_kernels.hpp"
#include "dense_util.hpp"

namespace ttqc {

namespace {

constexpr std::int64_t kDenseLimit = std::int64_t(1) << 24;

std::int64_t checked_numel(const std::vector<int>& modes) {
  std::int64_t n = 1;
  for (int m : modes) {
    if (m < 1) throw std::invalid_argument("mode sizes must be positive");
    n *= m;
    if (n > kDenseLimit) return -1;
  }
  return n;
}

}  // namespace

TTBlock::TTBlock(int left, int mode, int right)
    : left_(left), mode_(mode), right_(right) {
  if (left < 1 || mode < 1 || right < 1)
    throw std::invalid_argument("TTBlock: dimensions must be positive");
  buf_.assign(static_cast<std::size_t>(left) * mode * right, Complex(0.0, 0.0));
}

Complex& TTBlock::at(int a, int i, int b) {
  return buf_[static_cast<std::size_t>(a) +
              static_cast<std::size_t>(left_) * (i + static_cast<std::size_t>(mode_) * b)];
}

const Complex& TTBlock::at(int a, int i, int b) const {
  return buf_[static_cast<std::size_t>(a) +
              static_cast<std::size_t>(left_) * (i + static_cast<std::size_t>(mode_) * b)];
}

MatrixMap TTBlock::vfold() {
  return MatrixMap(buf_.data(), static_cast<Eigen::Index>(left_) * mode_, right_);
}
ConstMatrixMap TTBlock::vfold() const {
  return ConstMatrixMap(buf_.data(), static_cast<Eigen::Index>(left_) * mode_, right_);
}
MatrixMap TTBlock::hfold() {
  return MatrixMap(buf_.data(), left_, static_cast<Eigen::Index>(mode_) * right_);
}
ConstMatrixMap TTBlock::hfold() const {
  return ConstMatrixMap(buf_.data(), left_, static_cast<Eigen::Index>(mode_) * right_);
}
StridedMap TTBlock::mode_slice(int i) {
  return StridedMap(buf_.data() + static_cast<Eigen::Index>(left_) * i, left_, right_,
                    Eigen::OuterStride<>(static_cast<Eigen::Index>(left_) * mode_));
}
ConstStridedMap TTBlock::mode_slice(int i) const {
  return ConstStridedMap(buf_.data() + static_cast<Eigen::Index>(left_) * i, left_,
                         right_,
                         Eigen::OuterStride<>(static_cast<Eigen::Index>(left_) * mode_));
}

TTBlock TTBlock::from_vfold(const Matrix& m, int left, int mode, int right) {
  if (m.rows() != static_cast<Eigen::Index>(left) * mode || m.cols() != right)
    throw std::invalid_argument("TTBlock::from_vfold: shape mismatch");
  TTBlock out(left, mode, right);
  std::copy(m.data(), m.data() + m.size(), out.buf_.data());
  return out;
}

TTBlock TTBlock::from_hfold(const Matrix& m, int left, int mode, int right) {
  if (m.rows() != left || m.cols() != static_cast<Eigen::Index>(mode) * right)
    throw std::invalid_argument("TTBlock::from_hfold: shape mismatch");
  TTBlock out(left, mode, right);
  std::copy(m.data(), m.data() + m.size(), out.buf_.data());
  return out;
}

TTOpBlock::TTOpBlock(int left, int row_mode, int col_mode, int right)
    : left_(left), row_(row_mode), col_(col_mode), right_(right) {
  if (left < 1 || row_mode < 1 || col_mode < 1 || right < 1)
    throw std::invalid_argument("TTOpBlock: dimensions must be positive");
  buf_.assign(static_cast<std::size_t>(left) * row_ * col_ * right,
              Complex(0.0, 0.0));
}

Complex& TTOpBlock::at(int a, int s, int t, int b) {
  return buf_[static_cast<std::size_t>(a) +
              static_cast<std::size_t>(left_) *
                  (s + static_cast<std::size_t>(row_) *
                           (t + static_cast<std::size_t>(col_) * b))];
}

const Complex& TTOpBlock::at(int a, int s, int t, int b) const {
  return const_cast<TTOpBlock*>(this)->at(a, s, t, b);
}

MatrixMap TTOpBlock::fold() {
  return MatrixMap(buf_.data(), static_cast<Eigen::Index>(left_) * row_ * col_,
                   right_);
}
ConstMatrixMap TTOpBlock::fold() const {
  return ConstMatrixMap(buf_.data(),
                        static_cast<Eigen::Index>(left_) * row_ * col_, right_);
}
StridedMap TTOpBlock::pair_slice(int s, int t) {
  return StridedMap(
      buf_.data() + static_cast<Eigen::Index>(left_) * (s + static_cast<Eigen::Index>(row_) * t),
      left_, right_,
      Eigen::OuterStride<>(static_cast<Eigen::Index>(left_) * row_ * col_));
}
ConstStridedMap TTOpBlock::pair_slice(int s, int t) const {
  return ConstStridedMap(
      buf_.data() + static_cast<Eigen::Index>(left_) * (s + static_cast<Eigen::Index>(row_) * t),
      left_, right_,
      Eigen::OuterStride<>(static_cast<Eigen::Index>(left_) * row_ * col_));
}

TTVector::TTVector(std::vector<TTBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("TTVector: no blocks");
  if (blocks_.front().left() != 1 || blocks_.back().right() != 1)
    throw std::invalid_argument("TTVector: boundary ranks must be 1");
  for (std::size_t k = 0; k + 1 < blocks_.size(); ++k)
    if (blocks_[k].right() != blocks_[k + 1].left())
      throw std::invalid_argument("TTVector: rank chain mismatch");
}

int TTVector::rank(int k) const {
  if (k <= 0) return blocks_.front().left();
  return blocks_[k - 1].right();
}

int TTVector::max_rank() const {
  int r = 1;
  for (const auto& b : blocks_) r = std::max(r, b.right());
  return r;
}

std::vector<int> TTVector::modes() const {
  std::vector<int> m(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) m[k] = blocks_[k].mode();
  return m;
}

std::int64_t TTVector::numel() const {
  std::int64_t n = 1;
  for (const auto& b : blocks_) {
    n *= b.mode();
    if (n > kDenseLimit) return -1;
  }
  return n;
}

TTBlock& TTVector::block(int k) {
  left_ortho_ = std::min(left_ortho_, k);
  right_ortho_ = std::min(right_ortho_, order() - 1 - k);
  return blocks_[k];
}

void TTVector::mark_ortho(int left_count, int right_count) {
  if (left_count < 0 || right_count < 0 || left_count + right_count > order())
    throw std::invalid_argument("mark_ortho: counts out of range");
  left_ortho_ = left_count;
  right_ortho_ = right_count;
}

TTOperator::TTOperator(std::vector<TTOpBlock> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("TTOperator: no blocks");
  if (blocks_.front().left() != 1 || blocks_.back().right() != 1)
    throw std::invalid_argument("TTOperator: boundary ranks must be 1");
  for (std::size_t k = 0; k + 1 < blocks_.size(); ++k)
    if (blocks_[k].right() != blocks_[k + 1].left())
      throw std::invalid_argument("TTOperator: rank chain mismatch");
}

int TTOperator::rank(int k) const {
  if (k <= 0) return blocks_.front().left();
  return blocks_[k - 1].right();
}

int TTOperator::max_rank() const {
  int r = 1;
  for (const auto& b : blocks_) r = std::max(r, b.right());
  return r;
}

std::vector<int> TTOperator::row_modes() const {
  std::vector<int> m(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) m[k] = blocks_[k].row_mode();
  return m;
}

std::vector<int> TTOperator::col_modes() const {
  std::vector<int> m(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) m[k] = blocks_[k].col_mode();
  return m;
}

TTVector tt_zero(const std::vector<int>& modes) {
  if (modes.empty()) throw std::invalid_argument("tt_zero: no modes");
  std::vector<TTBlock> blocks;
  blocks.reserve(modes.size());
  for (int m : modes) blocks.emplace_back(1, m, 1);
  return TTVector(std::move(blocks));
}

TTVector tt_random(const std::vector<int>& modes, const std::vector<int>& ranks,
                   std::mt19937_64& rng) {
  const int d = static_cast<int>(modes.size());
  if (d == 0) throw std::invalid_argument("tt_random: no modes");
  std::vector<int> bonds(d + 1, 1);
  if (static_cast<int>(ranks.size()) == d - 1) {
    for (int k = 0; k < d - 1; ++k) bonds[k + 1] = ranks[k];
  } else if (static_cast<int>(ranks.size()) == d + 1) {
    bonds = ranks;
    if (bonds.front() != 1 || bonds.back() != 1)
      throw std::invalid_argument("tt_random: boundary ranks must be 1");
  } else {
    throw std::invalid_argument("tt_random: need d-1 interior or d+1 bond ranks");
  }
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(2.0));
  std::vector<TTBlock> blocks;
  blocks.reserve(d);
  for (int k = 0; k < d; ++k) {
    TTBlock b(bonds[k], modes[k], bonds[k + 1]);
    for (std::int64_t idx = 0; idx < b.size(); ++idx)
      b.data()[idx] = Complex(normal(rng), normal(rng));
    blocks.push_back(std::move(b));
  }
  return TTVector(std::move(blocks));
}

TTVector tt_from_dense(const Vector& x, const std::vector<int>& modes,
                       const TruncationPolicy& policy) {
  const int d = static_cast<int>(modes.size());
  const std::int64_t n = checked_numel(modes);
  if (n < 0) throw std::invalid_argument("tt_from_dense: tensor too large");
  if (x.size() != n) throw std::invalid_argument("tt_from_dense: size mismatch");

  const double nrm = x.norm();
  if (nrm == 0.0) return tt_zero(modes);

  if (d == 1) {
    TTBlock b(1, modes[0], 1);
    for (int i = 0; i < modes[0]; ++i) b.at(0, i, 0) = x(i);
    TTVector out({std::move(b)});
    return out;
  }

  const double bond_tol = policy.eps * nrm / std::sqrt(static_cast<double>(d - 1));
  // carry[r_prev, (i_k .. i_{d-1}) big-endian]
  Matrix carry(1, n);
  for (std::int64_t i = 0; i < n; ++i) carry(0, i) = x(i);

  std::vector<TTBlock> blocks(d);
  double disc_sq = 0.0;
  bool capped = false;
  std::int64_t rest = n;
  int r_prev = 1;
  for (int k = 0; k + 1 < d; ++k) {
    const int m = modes[k];
    rest /= m;
    // M[(a + r_prev*i), j] = carry[a, i*rest + j]
    Matrix unf(static_cast<Eigen::Index>(r_prev) * m, rest);
    for (int i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < rest; ++j)
        unf.col(j).segment(static_cast<Eigen::Index>(r_prev) * i, r_prev) =
            carry.col(static_cast<Eigen::Index>(i) * rest + j);
    detail::SvdSplit split = detail::svd_split(unf, bond_tol, policy.max_rank);
    disc_sq += split.discarded_sq;
    capped = capped || split.capped;
    blocks[k] = TTBlock::from_vfold(split.u, r_prev, m, split.rank);
    carry = std::move(split.sv);
    r_prev = split.rank;
  }
  blocks[d - 1] = TTBlock::from_hfold(carry, r_prev, modes[d - 1], 1);

  const double err = std::sqrt(disc_sq);
  if (capped && err > policy.eps * nrm)
    throw std::runtime_error(
        "tt_from_dense: rank cap forces relative error " +
        std::to_string(err / nrm) + " above the requested tolerance");

  TTVector out(std::move(blocks));
  out.mark_ortho(d - 1, 0);
  return out;
}

Vector tt_dense(const TTVector& x) {
  const std::int64_t n = x.numel();
  if (n < 0) throw std::invalid_argument("tt_dense: tensor too large");
  // T[(i_0 .. i_{k-1}) big-endian, r_k]
  Matrix t = Matrix::Ones(1, 1);
  for (int k = 0; k < x.order(); ++k) {
    const TTBlock& b = x.block(k);
    const int m = b.mode();
    Matrix t2 = t * b.hfold();  // [row, (i + m*beta)]
    Matrix tn(t.rows() * m, b.right());
    for (Eigen::Index row = 0; row < t.rows(); ++row)
      for (int i = 0; i < m; ++i)
        for (int beta = 0; beta < b.right(); ++beta)
          tn(row * m + i, beta) = t2(row, i + static_cast<Eigen::Index>(m) * beta);
    t = std::move(tn);
  }
  return Vector(t.col(0));
}

Complex tt_dot(const TTVector& a, const TTVector& b) {
  if (a.modes() != b.modes()) throw std::invalid_argument("tt_dot: mode mismatch");
  detail::VecEnv e = detail::vec_env_unit();
  for (int k = 0; k < a.order(); ++k)
    e = detail::vec_env_push_left(e, a.block(k), b.block(k));
  return e.m(0, 0);
}

double tt_norm(const TTVector& x) {
  const int d = x.order();
  if (x.left_ortho() + x.right_ortho() >= d - 1) {
    const int pivot = std::min(x.left_ortho(), d - 1);
    return x.block(pivot).vfold().norm();
  }
  // Orthogonalize rather than contract the Gram product: the squared norm
  // loses half the digits, so differences of nearly equal trains would
  // bottom out near sqrt(eps) times the block scale instead of eps.
  return orthogonalize(x, 0).block(0).vfold().norm();
}

TTVector tt_scale(Complex s, const TTVector& x) {
  TTVector y = x;
  const int lo = x.left_ortho(), ro = x.right_ortho();
  y.block(0).vfold() *= s;
  // Scaling one block preserves orthogonality of the others.
  y.mark_ortho(std::min(lo, 0), std::min(ro, y.order() - 1));
  return y;
}

TTVector tt_axpy(Complex alpha, const TTVector& x, const TTVector& y) {
  if (x.modes() != y.modes()) throw std::invalid_argument("tt_axpy: mode mismatch");
  const int d = x.order();
  if (d == 1) {
    TTBlock b(1, x.mode(0), 1);
    b.vfold() = alpha * x.block(0).vfold() + y.block(0).vfold();
    return TTVector({std::move(b)});
  }
  std::vector<TTBlock> blocks;
  blocks.reserve(d);
  for (int k = 0; k < d; ++k) {
    const TTBlock& bx = x.block(k);
    const TTBlock& by = y.block(k);
    const int m = bx.mode();
    if (k == 0) {
      TTBlock b(1, m, bx.right() + by.right());
      b.vfold().leftCols(bx.right()) = alpha * bx.vfold();
      b.vfold().rightCols(by.right()) = by.vfold();
      blocks.push_back(std::move(b));
    } else if (k == d - 1) {
      TTBlock b(bx.left() + by.left(), m, 1);
      for (int i = 0; i < m; ++i) {
        b.mode_slice(i).topRows(bx.left()) = bx.mode_slice(i);
        b.mode_slice(i).bottomRows(by.left()) = by.mode_slice(i);
      }
      blocks.push_back(std::move(b));
    } else {
      TTBlock b(bx.left() + by.left(), m, bx.right() + by.right());
      for (int i = 0; i < m; ++i) {
        b.mode_slice(i).topLeftCorner(bx.left(), bx.right()) = bx.mode_slice(i);
        b.mode_slice(i).bottomRightCorner(by.left(), by.right()) = by.mode_slice(i);
      }
      blocks.push_back(std::move(b));
    }
  }
  return TTVector(std::move(blocks));
}

TTVector tt_apply(const TTOperator& a, const TTVector& x) {
  if (a.col_modes() != x.modes())
    throw std::invalid_argument("tt_apply: mode mismatch");
  std::vector<TTBlock> blocks;
  blocks.reserve(x.order());
  for (int k = 0; k < x.order(); ++k) {
    const TTOpBlock& w = a.block(k);
    const TTBlock& bx = x.block(k);
    TTBlock out(w.left() * bx.left(), w.row_mode(), w.right() * bx.right());
    for (int i = 0; i < w.row_mode(); ++i) {
      Matrix acc = Matrix::Zero(out.left(), out.right());
      for (int j = 0; j < w.col_mode(); ++j) {
        Matrix ws = w.pair_slice(i, j);
        if (ws.cwiseAbs().maxCoeff() == 0.0) continue;
        acc.noalias() +=
            Eigen::kroneckerProduct(ws, Matrix(bx.mode_slice(j))).eval();
      }
      out.mode_slice(i) = acc;
    }
    blocks.push_back(std::move(out));
  }
  return TTVector(std::move(blocks));
}

TTVector orthogonalize(const TTVector& x, int pivot) {
  const int d = x.order();
  if (pivot < 0 || pivot >= d)
    throw std::invalid_argument("orthogonalize: pivot out of range");
  TTVector y = x;
  const int lo = x.left_ortho();
  const int ro = x.right_ortho();
  for (int k = lo; k < pivot; ++k) {
    detail::QrSplit qr = detail::qr_split(y.block(k).vfold());
    const int rnew = static_cast<int>(qr.q.cols());
    const TTBlock& cur = y.block(k);
    TTBlock q = TTBlock::from_vfold(qr.q, cur.left(), cur.mode(), rnew);
    const TTBlock& nxt = y.block(k + 1);
    TTBlock nb = TTBlock::from_hfold(qr.r * nxt.hfold(), rnew, nxt.mode(), nxt.right());
    y.block(k) = std::move(q);
    y.block(k + 1) = std::move(nb);
  }
  for (int k = d - 1 - ro; k > pivot; --k) {
    detail::LqSplit lq = detail::lq_split(y.block(k).hfold());
    const int rnew = static_cast<int>(lq.q.rows());
    const TTBlock& cur = y.block(k);
    TTBlock q = TTBlock::from_hfold(lq.q, rnew, cur.mode(), cur.right());
    const TTBlock& prv = y.block(k - 1);
    TTBlock pb = TTBlock::from_vfold(prv.vfold() * lq.l, prv.left(), prv.mode(), rnew);
    y.block(k) = std::move(q);
    y.block(k - 1) = std::move(pb);
  }
  y.mark_ortho(pivot, d - 1 - pivot);
  return y;
}

TTVector tt_round(const TTVector& x, const TruncationPolicy& policy,
                  RoundReport* report) {
  const int d = x.order();
  TTVector y = orthogonalize(x, 0);
  const double nrm = y.block(0).vfold().norm();
  if (nrm == 0.0) {
    if (report) *report = RoundReport{0.0, 1, false};
    return tt_zero(x.modes());
  }
  if (d == 1) {
    if (report) *report = RoundReport{0.0, 1, false};
    return y;
  }

  const double bond_tol = policy.eps * nrm / std::sqrt(static_cast<double>(d - 1));
  double disc_sq = 0.0;
  bool capped = false;
  for (int k = 0; k + 1 < d; ++k) {
    detail::SvdSplit split =
        detail::svd_split(y.block(k).vfold(), bond_tol, policy.max_rank);
    disc_sq += split.discarded_sq;
    capped = capped || split.capped;
    const TTBlock& cur = y.block(k);
    TTBlock u = TTBlock::from_vfold(split.u, cur.left(), cur.mode(), split.rank);
    const TTBlock& nxt = y.block(k + 1);
    TTBlock nb = TTBlock::from_hfold(split.sv * nxt.hfold(), split.rank,
                                     nxt.mode(), nxt.right());
    y.block(k) = std::move(u);
    y.block(k + 1) = std::move(nb);
  }
  y.mark_ortho(d - 1, 0);
  if (report) {
    report->error_bound = std::sqrt(disc_sq) / nrm;
    report->max_rank = y.max_rank();
    report->rank_capped = capped;
  }
  return y;
}

namespace {

// Fused index f = s * col_mode + t (row index is the slow digit), matching
// the row-major pairing used for density matrices throughout.
TTVector op_as_vector(const TTOperator& a) {
  std::vector<TTBlock> blocks;
  blocks.reserve(a.order());
  for (int k = 0; k < a.order(); ++k) {
    const TTOpBlock& w = a.block(k);
    const int m = w.row_mode(), n = w.col_mode();
    TTBlock b(w.left(), m * n, w.right());
    for (int bb = 0; bb < w.right(); ++bb)
      for (int t = 0; t < n; ++t)
        for (int s = 0; s < m; ++s)
          for (int aa = 0; aa < w.left(); ++aa)
            b.at(aa, s * n + t, bb) = w.at(aa, s, t, bb);
    blocks.push_back(std::move(b));
  }
  return TTVector(std::move(blocks));
}

TTOperator vector_as_op(const TTVector& v, const std::vector<int>& row_modes,
                        const std::vector<int>& col_modes) {
  if (row_modes.size() != static_cast<std::size_t>(v.order()) ||
      col_modes.size() != row_modes.size())
    throw std::invalid_argument("vector_as_op: mode count mismatch");
  std::vector<TTOpBlock> blocks;
  blocks.reserve(v.order());
  for (int k = 0; k < v.order(); ++k) {
    const TTBlock& b = v.block(k);
    const int m = row_modes[k], n = col_modes[k];
    if (b.mode() != m * n)
      throw std::invalid_argument("vector_as_op: fused mode mismatch");
    TTOpBlock w(b.left(), m, n, b.right());
    for (int bb = 0; bb < b.right(); ++bb)
      for (int t = 0; t < n; ++t)
        for (int s = 0; s < m; ++s)
          for (int aa = 0; aa < b.left(); ++aa)
            w.at(aa, s, t, bb) = b.at(aa, s * n + t, bb);
    blocks.push_back(std::move(w));
  }
  return TTOperator(std::move(blocks));
}

}  // namespace

Matrix op_dense(const TTOperator& a) {
  std::int64_t rows = 1, cols = 1;
  for (int k = 0; k < a.order(); ++k) {
    rows *= a.row_mode(k);
    cols *= a.col_mode(k);
    if (rows * cols > kDenseLimit)
      throw std::invalid_argument("op_dense: operator too large");
  }
  Vector v = tt_dense(op_as_vector(a));
  Matrix out(rows, cols);
  const int d = a.order();
  std::vector<int> digits(d);
  for (std::int64_t g = 0; g < v.size(); ++g) {
    std::int64_t rest = g;
    for (int k = d - 1; k >= 0; --k) {
      const int fused = a.row_mode(k) * a.col_mode(k);
      digits[k] = static_cast<int>(rest % fused);
      rest /= fused;
    }
    std::int64_t row = 0, col = 0;
    for (int k = 0; k < d; ++k) {
      row = row * a.row_mode(k) + digits[k] / a.col_mode(k);
      col = col * a.col_mode(k) + digits[k] % a.col_mode(k);
    }
    out(row, col) = v(g);
  }
  return out;
}

TTOperator op_identity(const std::vector<int>& modes) {
  if (modes.empty()) throw std::invalid_argument("op_identity: no modes");
  std::vector<TTOpBlock> blocks;
  blocks.reserve(modes.size());
  for (int m : modes) {
    TTOpBlock w(1, m, m, 1);
    for (int i = 0; i < m; ++i) w.at(0, i, i, 0) = 1.0;
    blocks.push_back(std::move(w));
  }
  return TTOperator(std::move(blocks));
}

TTOperator op_scale(Complex s, const TTOperator& a) {
  TTOperator b = a;
  b.block(0).fold() *= s;
  return b;
}

TTOperator op_axpy(Complex alpha, const TTOperator& a, const TTOperator& b) {
  if (a.row_modes() != b.row_modes() || a.col_modes() != b.col_modes())
    throw std::invalid_argument("op_axpy: mode mismatch");
  TTVector sum = tt_axpy(alpha, op_as_vector(a), op_as_vector(b));
  return vector_as_op(sum, a.row_modes(), a.col_modes());
}

TTOperator op_round(const TTOperator& a, const TruncationPolicy& policy) {
  TTVector v = tt_round(op_as_vector(a), policy);
  return vector_as_op(v, a.row_modes(), a.col_modes());
}

TTVector tt_prepend_block(const TTVector& x, const TTBlock& head) {
  if (head.left() != 1 || head.right() != x.block(0).left())
    throw std::invalid_argument("tt_prepend_block: rank mismatch");
  std::vector<TTBlock> blocks;
  blocks.reserve(x.order() + 1);
  blocks.push_back(head);
  for (int k = 0; k < x.order(); ++k) blocks.push_back(x.block(k));
  return TTVector(std::move(blocks));
}

TTVector tt_append_block(const TTVector& x, const TTBlock& tail) {
  if (tail.right() != 1 || tail.left() != x.block(x.order() - 1).right())
    throw std::invalid_argument("tt_append_block: rank mismatch");
  std::vector<TTBlock> blocks;
  blocks.reserve(x.order() + 1);
  for (int k = 0; k < x.order(); ++k) blocks.push_back(x.block(k));
  blocks.push_back(tail);
  return TTVector(std::move(blocks));
}

TTOperator op_prepend_block(const TTOperator& a, const TTOpBlock& head) {
  if (head.left() != 1 || head.right() != a.block(0).left())
    throw std::invalid_argument("op_prepend_block: rank mismatch");
  std::vector<TTOpBlock> blocks;
  blocks.reserve(a.order() + 1);
  blocks.push_back(head);
  for (int k = 0; k < a.order(); ++k) blocks.push_back(a.block(k));
  return TTOperator(std::move(blocks));
}

TTOperator op_append_block(const TTOperator& a, const TTOpBlock& tail) {
  if (tail.right() != 1 || tail.left() != a.block(a.order() - 1).right())
    throw std::invalid_argument("op_append_block: rank mismatch");
  std::vector<TTOpBlock> blocks;
  blocks.reserve(a.order() + 1);
  for (int k = 0; k < a.order(); ++k) blocks.push_back(a.block(k));
  blocks.push_back(tail);
  return TTOperator(std::move(blocks));
}

TTVector tt_contract_back(const TTVector& x, const Vector& weights) {
  const int d = x.order();
  if (d < 2) throw std::invalid_argument("tt_contract_back: need order >= 2");
  const TTBlock& last = x.block(d - 1);
  if (weights.size() != last.mode())
    throw std::invalid_argument("tt_contract_back: weight size mismatch");
  Matrix v = Matrix::Zero(last.left(), 1);
  for (int i = 0; i < last.mode(); ++i) v += weights(i) * Matrix(last.mode_slice(i));
  std::vector<TTBlock> blocks;
  blocks.reserve(d - 1);
  for (int k = 0; k + 2 < d; ++k) blocks.push_back(x.block(k));
  const TTBlock& prev = x.block(d - 2);
  blocks.push_back(
      TTBlock::from_vfold(prev.vfold() * v, prev.left(), prev.mode(), 1));
  return TTVector(std::move(blocks));
}

TTVector tt_contract_front(const TTVector& x, const Vector& weights) {
  const int d = x.order();
  if (d < 2) throw std::invalid_argument("tt_contract_front: need order >= 2");
  const TTBlock& head = x.block(0);
  if (weights.size() != head.mode())
    throw std::invalid_argument("tt_contract_front: weight size mismatch");
  Matrix v = Matrix::Zero(1, head.right());
  for (int i = 0; i < head.mode(); ++i) v += weights(i) * Matrix(head.mode_slice(i));
  const TTBlock& next = x.block(1);
  std::vector<TTBlock> blocks;
  blocks.reserve(d - 1);
  blocks.push_back(
      TTBlock::from_hfold(v * next.hfold(), 1, next.mode(), next.right()));
  for (int k = 2; k < d; ++k) blocks.push_back(x.block(k));
  return TTVector(std::move(blocks));
}

TTVector tt_slice_back(const TTVector& x, int index) {
  const int m = x.block(x.order() - 1).mode();
  if (index < 0 || index >= m)
    throw std::invalid_argument("tt_slice_back: index out of range");
  Vector w = Vector::Zero(m);
  w(index) = 1.0;
  return tt_contract_back(x, w);
}

TTVector tt_slice_front(const TTVector& x, int index) {
  const int m = x.block(0).mode();
  if (index < 0 || index >= m)
    throw std::invalid_argument("tt_slice_front: index out of range");
  Vector w = Vector::Zero(m);
  w(index) = 1.0;
  return tt_contract_front(x, w);
}

ReducedSystem frame_reduce(const TTOperator& a, const TTVector& f,
                           const TTVector& x, int k) {
  const int d = x.order();
  if (k < 0 || k >= d) throw std::invalid_argument("frame_reduce: bad block");
  if (a.row_modes() != x.modes() || a.col_modes() != x.modes())
    throw std::invalid_argument("frame_reduce: operator mode mismatch");
  if (f.modes() != x.modes())
    throw std::invalid_argument("frame_reduce: rhs mode mismatch");
  if (x.left_ortho() < k || x.right_ortho() < d - 1 - k)
    throw std::invalid_argument("frame_reduce: x must be orthogonal around k");

  detail::OpEnv le = detail::op_env_unit();
  detail::VecEnv lf = detail::vec_env_unit();
  for (int j = 0; j < k; ++j) {
    le = detail::op_env_push_left(le, x.block(j), a.block(j), x.block(j));
    lf = detail::vec_env_push_left(lf, x.block(j), f.block(j));
  }
  detail::OpEnv re = detail::op_env_unit();
  detail::VecEnv rf = detail::vec_env_unit();
  for (int j = d - 1; j > k; --j) {
    re = detail::op_env_push_right(re, x.block(j), a.block(j), x.block(j));
    rf = detail::vec_env_push_right(rf, x.block(j), f.block(j));
  }

  ReducedSystem out;
  out.matrix = detail::local_dense(le, a.block(k), re);
  out.rhs = detail::block_vec(detail::local_rhs(lf, f.block(k), rf));
  return out;
}

}  // namespace ttqc
