#pragma once

#include "ttqc/tensor_train.hpp"

namespace ttqc::detail {

// Environment of a (bra, operator, ket) sandwich contracted from one end up
// to, but not including, some block.  Logical tensor E[bra, mid, ket] stored
// column-major with bra fastest, so it reshapes freely between
// (bra*mid) x ket and bra x (mid*ket).
struct OpEnv {
  Matrix m = Matrix::Ones(1, 1);
  int bra = 1;
  int mid = 1;
  int ket = 1;
};

OpEnv op_env_unit();
// Extend a left environment by one block triple (covers one more block on
// the right edge of the contracted region).
OpEnv op_env_push_left(const OpEnv& e, const TTBlock& bra, const TTOpBlock& w,
                       const TTBlock& ket);
// Extend a right environment by one block triple (covers one more block on
// the left edge of the contracted region).
OpEnv op_env_push_right(const OpEnv& e, const TTBlock& bra, const TTOpBlock& w,
                        const TTBlock& ket);

// Environment of a (bra, ket) overlap, E[bra, ket].
struct VecEnv {
  Matrix m = Matrix::Ones(1, 1);
};

VecEnv vec_env_unit();
VecEnv vec_env_push_left(const VecEnv& e, const TTBlock& bra, const TTBlock& ket);
VecEnv vec_env_push_right(const VecEnv& e, const TTBlock& bra, const TTBlock& ket);

// y[l.bra, i, r.bra] = sum l[.,a,.] w[a,i,i',b] r[.,b,.] x[l.ket, i', r.ket];
// the matrix-free application of the frame-reduced operator.
TTBlock local_matvec(const OpEnv& l, const TTOpBlock& w, const OpEnv& r,
                     const TTBlock& x);

// g[l.bra, i, r.bra] = sum l[.,phi] f[phi, i, psi] r[.,psi].
TTBlock local_rhs(const VecEnv& l, const TTBlock& f, const VecEnv& r);

// Dense frame-reduced operator, rows and columns flattened like block_vec.
Matrix local_dense(const OpEnv& l, const TTOpBlock& w, const OpEnv& r);

// Diagonal of local_dense, for Jacobi preconditioning.
Vector local_diag(const OpEnv& l, const TTOpBlock& w, const OpEnv& r);

// Flattening of a block in storage order: index a + left*(i + mode*b).
Vector block_vec(const TTBlock& b);
TTBlock block_from_vec(const Vector& v, int left, int mode, int right);

}  // namespace ttqc::detail
