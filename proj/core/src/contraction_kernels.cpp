#include "contraction_kernels.hpp"

#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace ttqc::detail {

namespace {

// (bra*mid) x ket view of an environment buffer.
ConstMatrixMap env_wide(const OpEnv& e) {
  return ConstMatrixMap(e.m.data(), static_cast<Eigen::Index>(e.bra) * e.mid,
                        e.ket);
}

// bra x (mid*ket) view of an environment buffer.
ConstMatrixMap env_flat(const OpEnv& e) {
  return ConstMatrixMap(e.m.data(), e.bra,
                        static_cast<Eigen::Index>(e.mid) * e.ket);
}

// W[(a + ra*s), (t + nc*b)]: zero-copy view of an operator block.
ConstMatrixMap op_rows_as(const TTOpBlock& w) {
  return ConstMatrixMap(
      &w.at(0, 0, 0, 0),
      static_cast<Eigen::Index>(w.left()) * w.row_mode(),
      static_cast<Eigen::Index>(w.col_mode()) * w.right());
}

// X2[(s + mode*b), a] = x[a, s, b]: permuted copy used to contract a block
// against everything but its left rank.
Matrix permute_left_last(const TTBlock& x) {
  const int l = x.left(), m = x.mode(), r = x.right();
  Matrix out(static_cast<Eigen::Index>(m) * r, l);
  for (int b = 0; b < r; ++b)
    for (int s = 0; s < m; ++s)
      for (int a = 0; a < l; ++a)
        out(s + static_cast<Eigen::Index>(m) * b, a) = x.at(a, s, b);
  return out;
}

}  // namespace

OpEnv op_env_unit() { return OpEnv{}; }

OpEnv op_env_push_left(const OpEnv& e, const TTBlock& bra, const TTOpBlock& w,
                       const TTBlock& ket) {
  if (e.bra != bra.left() || e.mid != w.left() || e.ket != ket.left())
    throw std::invalid_argument("op_env_push_left: rank mismatch");
  if (w.row_mode() != bra.mode() || w.col_mode() != ket.mode())
    throw std::invalid_argument("op_env_push_left: mode mismatch");
  const int rb = e.bra, ra = e.mid;
  const int m = w.row_mode(), n = w.col_mode(), rap = w.right();
  const int rbn = bra.right(), rkn = ket.right();

  // T1[(ab + rb*a), (t + n*bk)] = sum_ak E[ab, a, ak] ket[ak, t, bk]
  Matrix t1 = env_wide(e) * ket.hfold();

  // T2[(ab + rb*bk), (a + ra*t)]
  Matrix t2(static_cast<Eigen::Index>(rb) * rkn, static_cast<Eigen::Index>(ra) * n);
  for (int bk = 0; bk < rkn; ++bk)
    for (int t = 0; t < n; ++t)
      for (int a = 0; a < ra; ++a)
        t2.col(a + static_cast<Eigen::Index>(ra) * t)
            .segment(static_cast<Eigen::Index>(rb) * bk, rb) =
            t1.col(t + static_cast<Eigen::Index>(n) * bk)
                .segment(static_cast<Eigen::Index>(rb) * a, rb);

  // W2[(a + ra*t), (s + m*b)] = w[a, s, t, b]
  Matrix w2(static_cast<Eigen::Index>(ra) * n, static_cast<Eigen::Index>(m) * rap);
  for (int b = 0; b < rap; ++b)
    for (int t = 0; t < n; ++t)
      for (int s = 0; s < m; ++s)
        for (int a = 0; a < ra; ++a)
          w2(a + static_cast<Eigen::Index>(ra) * t,
             s + static_cast<Eigen::Index>(m) * b) = w.at(a, s, t, b);

  // T3[(ab + rb*bk), (s + m*b)]
  Matrix t3 = t2 * w2;

  // T4[(ab + rb*s), (b + rap*bk)]
  Matrix t4(static_cast<Eigen::Index>(rb) * m, static_cast<Eigen::Index>(rap) * rkn);
  for (int bk = 0; bk < rkn; ++bk)
    for (int b = 0; b < rap; ++b)
      for (int s = 0; s < m; ++s)
        t4.col(b + static_cast<Eigen::Index>(rap) * bk)
            .segment(static_cast<Eigen::Index>(rb) * s, rb) =
            t3.col(s + static_cast<Eigen::Index>(m) * b)
                .segment(static_cast<Eigen::Index>(rb) * bk, rb);

  OpEnv out;
  out.bra = rbn;
  out.mid = rap;
  out.ket = rkn;
  Matrix res = bra.vfold().adjoint() * t4;  // [bb, (b + rap*bk)]
  out.m = MatrixMap(res.data(), static_cast<Eigen::Index>(rbn) * rap, rkn);
  return out;
}

OpEnv op_env_push_right(const OpEnv& e, const TTBlock& bra, const TTOpBlock& w,
                        const TTBlock& ket) {
  if (e.bra != bra.right() || e.mid != w.right() || e.ket != ket.right())
    throw std::invalid_argument("op_env_push_right: rank mismatch");
  if (w.row_mode() != bra.mode() || w.col_mode() != ket.mode())
    throw std::invalid_argument("op_env_push_right: mode mismatch");
  const int rb = e.bra, rap = e.mid;
  const int m = w.row_mode(), n = w.col_mode(), ra = w.left();
  const int rbp = bra.left(), rkp = ket.left();

  // T1[(bb + rb*b), (ak + rkp*t)] = sum_bk E[bb, b, bk] ket[ak, t, bk]
  Matrix t1 = env_wide(e) * ket.vfold().transpose();

  // T1p[(t + n*b), (bb + rb*ak)]
  Matrix t1p(static_cast<Eigen::Index>(n) * rap, static_cast<Eigen::Index>(rb) * rkp);
  for (int ak = 0; ak < rkp; ++ak)
    for (int t = 0; t < n; ++t)
      for (int b = 0; b < rap; ++b)
        for (int bb = 0; bb < rb; ++bb)
          t1p(t + static_cast<Eigen::Index>(n) * b,
              bb + static_cast<Eigen::Index>(rb) * ak) =
              t1(bb + static_cast<Eigen::Index>(rb) * b,
                 ak + static_cast<Eigen::Index>(rkp) * t);

  // T3[(a + ra*s), (bb + rb*ak)] = sum_{t,b} w[a,s,t,b] T1p[(t + n*b), .]
  Matrix t3 = op_rows_as(w) * t1p;

  // T3p[(s + m*bb), (a + ra*ak)]
  Matrix t3p(static_cast<Eigen::Index>(m) * rb, static_cast<Eigen::Index>(ra) * rkp);
  for (int ak = 0; ak < rkp; ++ak)
    for (int a = 0; a < ra; ++a)
      for (int bb = 0; bb < rb; ++bb)
        for (int s = 0; s < m; ++s)
          t3p(s + static_cast<Eigen::Index>(m) * bb,
              a + static_cast<Eigen::Index>(ra) * ak) =
              t3(a + static_cast<Eigen::Index>(ra) * s,
                 bb + static_cast<Eigen::Index>(rb) * ak);

  OpEnv out;
  out.bra = rbp;
  out.mid = ra;
  out.ket = rkp;
  Matrix x2 = permute_left_last(bra);       // [(s + m*bb), ab]
  Matrix res = x2.adjoint() * t3p;          // [ab, (a + ra*ak)]
  out.m = MatrixMap(res.data(), static_cast<Eigen::Index>(rbp) * ra, rkp);
  return out;
}

VecEnv vec_env_unit() { return VecEnv{}; }

VecEnv vec_env_push_left(const VecEnv& e, const TTBlock& bra, const TTBlock& ket) {
  if (e.m.rows() != bra.left() || e.m.cols() != ket.left())
    throw std::invalid_argument("vec_env_push_left: rank mismatch");
  if (bra.mode() != ket.mode())
    throw std::invalid_argument("vec_env_push_left: mode mismatch");
  // T1[ab, (s + m*bk)] then reshape rows to (ab + l*s).
  Matrix t1 = e.m * ket.hfold();
  ConstMatrixMap t1v(t1.data(),
                     static_cast<Eigen::Index>(bra.left()) * bra.mode(),
                     ket.right());
  VecEnv out;
  out.m = bra.vfold().adjoint() * t1v;
  return out;
}

VecEnv vec_env_push_right(const VecEnv& e, const TTBlock& bra, const TTBlock& ket) {
  if (e.m.rows() != bra.right() || e.m.cols() != ket.right())
    throw std::invalid_argument("vec_env_push_right: rank mismatch");
  if (bra.mode() != ket.mode())
    throw std::invalid_argument("vec_env_push_right: mode mismatch");
  const int m = ket.mode(), rkp = ket.left(), rbp = bra.left();
  const int rb = static_cast<int>(e.m.rows());
  // T1[bb, (ak + rkp*t)]
  Matrix t1 = e.m * ket.vfold().transpose();
  // T1p[(s + m*bb), ak]
  Matrix t1p(static_cast<Eigen::Index>(m) * rb, rkp);
  for (int ak = 0; ak < rkp; ++ak)
    for (int s = 0; s < m; ++s)
      for (int bb = 0; bb < rb; ++bb)
        t1p(s + static_cast<Eigen::Index>(m) * bb, ak) =
            t1(bb, ak + static_cast<Eigen::Index>(rkp) * s);
  Matrix x2 = permute_left_last(bra);  // [(s + m*bb), ab]
  VecEnv out;
  out.m = x2.adjoint() * t1p;
  return out;
}

TTBlock local_matvec(const OpEnv& l, const TTOpBlock& w, const OpEnv& r,
                     const TTBlock& x) {
  if (l.ket != x.left() || r.ket != x.right())
    throw std::invalid_argument("local_matvec: rank mismatch with x");
  if (l.mid != w.left() || r.mid != w.right() || w.col_mode() != x.mode())
    throw std::invalid_argument("local_matvec: operator mismatch");
  const int ra = w.left(), rap = w.right(), m = w.row_mode(), n = w.col_mode();
  const int ll = l.bra, lk = l.ket, rl = r.bra;

  // T1[(ak + lk*t), (bb + rl*b)] = sum_bk x[ak, t, bk] R[bb, b, bk]
  Matrix t1 = x.vfold() * env_wide(r).transpose();

  // T1p[(t + n*b), (ak + lk*bb)]
  Matrix t1p(static_cast<Eigen::Index>(n) * rap, static_cast<Eigen::Index>(lk) * rl);
  for (int bb = 0; bb < rl; ++bb)
    for (int b = 0; b < rap; ++b)
      for (int t = 0; t < n; ++t)
        for (int ak = 0; ak < lk; ++ak)
          t1p(t + static_cast<Eigen::Index>(n) * b,
              ak + static_cast<Eigen::Index>(lk) * bb) =
              t1(ak + static_cast<Eigen::Index>(lk) * t,
                 bb + static_cast<Eigen::Index>(rl) * b);

  // T2[(a + ra*s), (ak + lk*bb)]
  Matrix t2 = op_rows_as(w) * t1p;

  // T2p[(a + ra*ak), (s + m*bb)]
  Matrix t2p(static_cast<Eigen::Index>(ra) * lk, static_cast<Eigen::Index>(m) * rl);
  for (int bb = 0; bb < rl; ++bb)
    for (int s = 0; s < m; ++s)
      for (int ak = 0; ak < lk; ++ak)
        for (int a = 0; a < ra; ++a)
          t2p(a + static_cast<Eigen::Index>(ra) * ak,
              s + static_cast<Eigen::Index>(m) * bb) =
              t2(a + static_cast<Eigen::Index>(ra) * s,
                 ak + static_cast<Eigen::Index>(lk) * bb);

  // y[al, (s + m*bb)] = sum L[al, (a + ra*ak)] T2p[., .]
  Matrix y = env_flat(l) * t2p;
  return TTBlock::from_hfold(y, ll, m, rl);
}

TTBlock local_rhs(const VecEnv& l, const TTBlock& f, const VecEnv& r) {
  if (l.m.cols() != f.left() || r.m.cols() != f.right())
    throw std::invalid_argument("local_rhs: rank mismatch");
  // T1[al, (i + m*psi)], reshape to [(al + l*i), psi], multiply r'.
  Matrix t1 = l.m * f.hfold();
  ConstMatrixMap t1v(t1.data(),
                     static_cast<Eigen::Index>(l.m.rows()) * f.mode(),
                     f.right());
  Matrix g = t1v * r.m.transpose();
  return TTBlock::from_vfold(g, static_cast<int>(l.m.rows()), f.mode(),
                             static_cast<int>(r.m.rows()));
}

namespace {

// l slice over the middle index: La[al, ak] with fixed a.
ConstStridedMap env_mid_slice(const OpEnv& e, int a) {
  return ConstStridedMap(e.m.data() + static_cast<Eigen::Index>(e.bra) * a,
                         e.bra, e.ket,
                         Eigen::OuterStride<>(static_cast<Eigen::Index>(e.bra) * e.mid));
}

// w slice over the rank pair: Wab[s, t].
Matrix op_pair_rank_slice(const TTOpBlock& w, int a, int b) {
  Matrix out(w.row_mode(), w.col_mode());
  for (int t = 0; t < w.col_mode(); ++t)
    for (int s = 0; s < w.row_mode(); ++s) out(s, t) = w.at(a, s, t, b);
  return out;
}

}  // namespace

Matrix local_dense(const OpEnv& l, const TTOpBlock& w, const OpEnv& r) {
  const Eigen::Index nrow =
      static_cast<Eigen::Index>(l.bra) * w.row_mode() * r.bra;
  const Eigen::Index ncol =
      static_cast<Eigen::Index>(l.ket) * w.col_mode() * r.ket;
  Matrix out = Matrix::Zero(nrow, ncol);
  for (int a = 0; a < w.left(); ++a) {
    Matrix la = env_mid_slice(l, a);
    for (int b = 0; b < w.right(); ++b) {
      Matrix wab = op_pair_rank_slice(w, a, b);
      if (wab.cwiseAbs().maxCoeff() == 0.0) continue;
      Matrix rb = env_mid_slice(r, b);
      // Row index al + l.bra*s + l.bra*m*bl matches Kronecker order
      // (slowest factor first).
      out.noalias() +=
          Eigen::kroneckerProduct(rb, Eigen::kroneckerProduct(wab, la).eval())
              .eval();
    }
  }
  return out;
}

Vector local_diag(const OpEnv& l, const TTOpBlock& w, const OpEnv& r) {
  if (l.bra != l.ket || r.bra != r.ket || w.row_mode() != w.col_mode())
    throw std::invalid_argument("local_diag: needs a square local system");
  const int rl = l.bra, m = w.row_mode(), rr = r.bra;
  Vector out = Vector::Zero(static_cast<Eigen::Index>(rl) * m * rr);
  Vector la(rl), rb(rr);
  for (int a = 0; a < w.left(); ++a) {
    auto ls = env_mid_slice(l, a);
    for (int i = 0; i < rl; ++i) la(i) = ls(i, i);
    for (int b = 0; b < w.right(); ++b) {
      auto rs = env_mid_slice(r, b);
      for (int i = 0; i < rr; ++i) rb(i) = rs(i, i);
      for (int s = 0; s < m; ++s) {
        const Complex ws = w.at(a, s, s, b);
        if (ws == Complex(0.0, 0.0)) continue;
        for (int br = 0; br < rr; ++br) {
          const Complex c = ws * rb(br);
          out.segment(static_cast<Eigen::Index>(rl) * (s + static_cast<Eigen::Index>(m) * br), rl) +=
              c * la;
        }
      }
    }
  }
  return out;
}

Vector block_vec(const TTBlock& b) {
  Vector v(b.size());
  std::copy(b.data(), b.data() + b.size(), v.data());
  return v;
}

TTBlock block_from_vec(const Vector& v, int left, int mode, int right) {
  if (v.size() != static_cast<Eigen::Index>(left) * mode * right)
    throw std::invalid_argument("block_from_vec: size mismatch");
  TTBlock out(left, mode, right);
  std::copy(v.data(), v.data() + v.size(), out.data());
  return out;
}

}  // namespace ttqc::detail
