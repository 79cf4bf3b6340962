#pragma once

#include <vector>

#include "ttqc/tensor_train.hpp"

namespace ttqc {

// Spin-1/2 chain with nearest-neighbour exchange couplings
//   H0 = sum_k [ jx X_k X_{k+1} + jy Y_k Y_{k+1} + jz Z_k Z_{k+1} ]
// and single-site control Hamiltonians c_k(t) * sigma_axis at chosen sites.
//
// Density matrices live in tensor trains over d sites of mode 4, one fused
// digit f = 2i + j per site (row index i is the slow bit).  Operators on
// that space are superoperators; lift_superoperator turns a Hamiltonian MPO
// into the commutator superoperator rho -> H rho - rho H.

struct SpinChainSpec {
  int sites = 2;
  double jx = 1.0;
  double jy = 1.0;
  double jz = 1.0;
};

enum class Axis { x, y, z };

struct ControlTerm {
  int site = 0;
  Axis axis = Axis::z;
};

// Nearest-neighbour exchange MPO over modes 2; bond rank 5 in the interior.
TTOperator build_hamiltonian_mpo(const SpinChainSpec& chain);

// Single sigma_axis at one site, bond rank 1.
TTOperator build_site_mpo(int sites, const ControlTerm& term);

// Commutator superoperator of an MPO Hamiltonian, acting on fused mode-4
// trains; compressed to working precision.
TTOperator lift_superoperator(const TTOperator& h);

// Block upper-triangular generator [[gen, ctrl], [0, gen]] on a leading mode
// of size 2: channel 0 carries the derivative, channel 1 the state.
TTOperator build_augmented_operator(const TTOperator& gen, const TTOperator& ctrl);

// Rank-1 density train of the product state described by bits, 0 = up.
TTVector build_pure_density_tt(const std::vector<int>& bits);

Complex tt_trace(const TTVector& rho);
TTVector hermitian_adjoint(const TTVector& rho);
// <sigma_z at site> = tr(Z_site rho); real for Hermitian rho.
double site_sz(const TTVector& rho, int site);

struct LiouvilleModel {
  SpinChainSpec chain;
  std::vector<ControlTerm> controls;
  TTOperator drift;                      // lifted drift superoperator
  std::vector<TTOperator> control_ops;   // lifted control superoperators
};

LiouvilleModel build_model(const SpinChainSpec& chain,
                           const std::vector<ControlTerm>& controls);

// drift + sum_k c_k control_ops[k], compressed.
TTOperator interval_generator(const LiouvilleModel& model, const RealVector& c);

}  // namespace ttqc
