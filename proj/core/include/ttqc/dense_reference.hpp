#pragma once

#include <vector>

#include "ttqc/tensor_train.hpp"

namespace ttqc {

// Dense reference implementation for small spin counts.  Everything here
// works on 2^d x 2^d matrices and serves as the independent check for the
// tensor-network pipeline; nothing in it touches tensor trains.
//
// Vectorization is row-major: dense_vec(rho)[i * n + j] = rho(i, j).  The
// tensor-network side orders the same data sitewise with the fused digit
// f_k = 2 * i_k + j_k per site; to_fused_order / to_pair_order translate.

struct DenseModel {
  Matrix h0;                     // drift Hamiltonian
  std::vector<Matrix> controls;  // control Hamiltonians, one per channel
};

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// I (x) ... (x) op (x) ... (x) I with op at the given site (0 based).
Matrix dense_site_operator(int sites, int site, const Matrix& op);

// sum_k [ jx X_k X_{k+1} + jy Y_k Y_{k+1} + jz Z_k Z_{k+1} ]
Matrix dense_heisenberg(int sites, double jx, double jy, double jz);

// Projector onto the product state described by bits, 0 = up = e_0.
Matrix dense_pure_density(const std::vector<int>& bits);

Vector dense_vec(const Matrix& rho);
Matrix dense_unvec(const Vector& v);

Vector to_fused_order(const Vector& pair_vec, int sites);
Vector to_pair_order(const Vector& fused_vec, int sites);

// Commutator superoperator of h in the fused sitewise ordering:
// to_fused_order(dense_vec(h rho - rho h)) = dense_superoperator(h, d) *
// to_fused_order(dense_vec(rho)).
Matrix dense_superoperator(const Matrix& h, int sites);

// H(c) = h0 + sum_k c_k controls[k].
Matrix dense_hamiltonian(const DenseModel& m, const RealVector& c);

Matrix dense_commutator(const DenseModel& m, const RealVector& c,
                        const Matrix& rho);

// One piecewise-constant interval: rho -> U rho U' with U = exp(-i tau H(c)).
Matrix dense_step(const DenseModel& m, const RealVector& c, const Matrix& rho,
                  double tau);

// pulses is N x K: N intervals, K control channels.
Matrix dense_propagate(const DenseModel& m, const RealMatrix& pulses,
                       const Matrix& rho0, double tau);

// Re <target, rho> in the Hilbert-Schmidt inner product.
double dense_fidelity(const Matrix& target, const Matrix& rho);

// Central-difference gradient of the final fidelity in every pulse entry.
RealMatrix dense_gradient_fd(const DenseModel& m, const RealMatrix& pulses,
                             const Matrix& rho0, const Matrix& target,
                             double tau, double delta);

// Exact gradient by adjoint back-propagation; the derivative of each
// interval map uses the divided-difference formula in the eigenbasis of
// H(c), so no finite differencing is involved.
RealMatrix dense_adjoint_gradient(const DenseModel& m, const RealMatrix& pulses,
                                  const Matrix& rho0, const Matrix& target,
                                  double tau);

}  // namespace ttqc
