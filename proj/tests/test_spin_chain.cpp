#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ttqc/dense_reference.hpp"
#include "ttqc/spin_chain.hpp"
#include "test_util.hpp"

using namespace ttqc;
using testutil::rel_err;

namespace {

// Random Hermitian density-like train: rho = sum of pure products plus its
// adjoint, normalized to unit trace.
TTVector random_density_tt(int sites, std::mt19937_64& rng) {
  std::vector<int> modes(sites, 4);
  TTVector x = tt_random(modes, std::vector<int>(sites - 1, 2), rng);
  TTVector h = tt_axpy(Complex(1.0, 0.0), hermitian_adjoint(x), x);
  Complex tr = tt_trace(h);
  return tt_scale(1.0 / tr, h);
}

Matrix dense_of_fused(const TTVector& rho) {
  return dense_unvec(to_pair_order(tt_dense(rho), rho.order()));
}

}  // namespace

TEST_CASE("exchange MPO matches the dense Hamiltonian") {
  for (int sites : {2, 3, 5}) {
    SpinChainSpec chain{sites, 0.8, 1.3, -0.4};
    TTOperator h = build_hamiltonian_mpo(chain);
    CHECK(h.max_rank() <= 5);
    CHECK(rel_err(op_dense(h),
                  dense_heisenberg(sites, chain.jx, chain.jy, chain.jz)) < 1e-13);
  }
}

TEST_CASE("two-spin exchange spectrum from the MPO") {
  const double j = 2.0 * 3.14159265358979323846;
  SpinChainSpec chain{2, j, j, j};
  Matrix h = op_dense(build_hamiltonian_mpo(chain));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-3.0 * j).epsilon(1e-12));
  CHECK(es.eigenvalues()(3) == doctest::Approx(j).epsilon(1e-12));
}

TEST_CASE("site MPO builds a single Pauli factor") {
  ControlTerm term{1, Axis::y};
  TTOperator s = build_site_mpo(3, term);
  CHECK(s.max_rank() == 1);
  CHECK(rel_err(op_dense(s), dense_site_operator(3, 1, pauli_y())) < 1e-15);
}

TEST_CASE("lifted superoperator equals the dense commutator matrix") {
  for (int sites : {1, 2, 3}) {
    SpinChainSpec chain{sites, 1.0, 1.0, 2.2};
    TTOperator lifted = lift_superoperator(build_hamiltonian_mpo(chain));
    Matrix want = dense_superoperator(
        dense_heisenberg(sites, chain.jx, chain.jy, chain.jz), sites);
    CHECK(rel_err(op_dense(lifted), want) < 1e-12);
  }
  TTOperator ctrl = lift_superoperator(build_site_mpo(2, {0, Axis::z}));
  CHECK(rel_err(op_dense(ctrl),
                dense_superoperator(dense_site_operator(2, 0, pauli_z()), 2)) <
        1e-13);
  CHECK(ctrl.max_rank() <= 2);
}

TEST_CASE("lifted action reproduces the commutator on a density train") {
  std::mt19937_64 rng(3);
  const int sites = 3;
  SpinChainSpec chain{sites, 1.0, 1.0, 1.0};
  TTOperator lifted = lift_superoperator(build_hamiltonian_mpo(chain));
  TTVector rho = random_density_tt(sites, rng);

  Matrix rho_dense = dense_of_fused(rho);
  Matrix h = dense_heisenberg(sites, 1, 1, 1);
  Vector want = to_fused_order(dense_vec(Matrix(h * rho_dense - rho_dense * h)), sites);
  CHECK(rel_err(tt_dense(tt_apply(lifted, rho)), want) < 1e-11);
}

TEST_CASE("pure product density train") {
  std::vector<int> bits = {0, 1, 1, 0};
  TTVector rho = build_pure_density_tt(bits);
  CHECK(rho.max_rank() == 1);
  CHECK(rel_err(tt_dense(rho),
                to_fused_order(dense_vec(dense_pure_density(bits)), 4)) < 1e-15);
  CHECK(std::abs(tt_trace(rho) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(site_sz(rho, 0) == doctest::Approx(1.0));
  CHECK(site_sz(rho, 1) == doctest::Approx(-1.0));
  CHECK(site_sz(rho, 3) == doctest::Approx(1.0));
}

TEST_CASE("trace adjoint and magnetization against dense") {
  std::mt19937_64 rng(9);
  const int sites = 4;
  TTVector rho = random_density_tt(sites, rng);
  Matrix rho_dense = dense_of_fused(rho);

  CHECK(std::abs(tt_trace(rho) - rho_dense.trace()) < 1e-12);
  CHECK(rel_err(dense_of_fused(hermitian_adjoint(rho)),
                Matrix(rho_dense.adjoint())) < 1e-13);
  for (int site = 0; site < sites; ++site) {
    const double want =
        (dense_site_operator(sites, site, pauli_z()) * rho_dense).trace().real();
    CHECK(site_sz(rho, site) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("interval generator assembles drift plus controls") {
  SpinChainSpec chain{3, 1.0, 1.0, 1.0};
  std::vector<ControlTerm> terms = {{0, Axis::z}, {2, Axis::x}};
  LiouvilleModel model = build_model(chain, terms);

  RealVector c(2);
  c << 0.7, -1.9;
  DenseModel dm;
  dm.h0 = dense_heisenberg(3, 1, 1, 1);
  dm.controls = {dense_site_operator(3, 0, pauli_z()),
                 dense_site_operator(3, 2, pauli_x())};
  Matrix want = dense_superoperator(dense_hamiltonian(dm, c), 3);
  CHECK(rel_err(op_dense(interval_generator(model, c)), want) < 1e-12);
}

TEST_CASE("augmented operator is block upper triangular") {
  SpinChainSpec chain{2, 1.0, 1.0, 1.0};
  LiouvilleModel model = build_model(chain, {{0, Axis::z}});
  TTOperator aug = build_augmented_operator(model.drift, model.control_ops[0]);

  Matrix full = op_dense(aug);
  const int n = 16;
  Matrix gen = op_dense(model.drift);
  Matrix ctrl = op_dense(model.control_ops[0]);
  CHECK(rel_err(Matrix(full.topLeftCorner(n, n)), gen) < 1e-13);
  CHECK(rel_err(Matrix(full.bottomRightCorner(n, n)), gen) < 1e-13);
  CHECK(rel_err(Matrix(full.topRightCorner(n, n)), ctrl) < 1e-13);
  CHECK(full.bottomLeftCorner(n, n).norm() == 0.0);

  // Leading digit 1 selects the state channel.
  TTVector rho = build_pure_density_tt({0, 1});
  TTBlock head(1, 2, 1);
  head.at(0, 1, 0) = 1.0;
  TTVector aug_state = tt_prepend_block(rho, head);
  TTVector out = tt_apply(aug, aug_state);
  CHECK(rel_err(tt_dense(tt_slice_front(out, 1)),
                tt_dense(tt_apply(model.drift, rho))) < 1e-12);
  CHECK(rel_err(tt_dense(tt_slice_front(out, 0)),
                tt_dense(tt_apply(model.control_ops[0], rho))) < 1e-12);
}
