#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include <Eigen/LU>

#include "ttqc/dense_reference.hpp"
#include "ttqc/spectral.hpp"
#include "ttqc/spin_chain.hpp"
#include "test_util.hpp"

using namespace ttqc;
using testutil::rel_err;

TEST_CASE("order one degenerates to implicit Euler") {
  const double tau = 0.25;
  SpectralGrid g = build_grid(1, tau);
  CHECK(g.nodes(0) == 0.0);
  CHECK(g.nodes(1) == doctest::Approx(tau));
  CHECK(g.diff(0, 0) == doctest::Approx(1.0 / tau));
  CHECK(g.rhs_weights(0) == doctest::Approx(1.0 / tau));
  CHECK(g.endpoint_weights(0) == doctest::Approx(1.0));
}

TEST_CASE("initial-value weights equal the row sums exactly") {
  for (int m = 1; m <= 16; ++m) {
    SpectralGrid g = build_grid(m, 0.7);
    RealVector row_sums = g.diff * RealVector::Ones(m);
    CHECK((row_sums - g.rhs_weights).cwiseAbs().maxCoeff() < 1e-12 / 0.7);
  }
}

TEST_CASE("differentiation is exact on polynomials up to the grid degree") {
  for (int m : {2, 4, 8, 12}) {
    const double tau = 1.3;
    SpectralGrid g = build_grid(m, tau);
    for (int deg = 0; deg <= m; ++deg) {
      RealVector p(m), dp(m), p0(1);
      for (int i = 0; i < m; ++i) {
        const double t = g.nodes(i + 1);
        p(i) = std::pow(t, deg);
        dp(i) = deg == 0 ? 0.0 : deg * std::pow(t, deg - 1);
      }
      const double pz = deg == 0 ? 1.0 : 0.0;
      RealVector got = g.diff * p - g.rhs_weights * pz;
      const double scale = std::max(1.0, dp.cwiseAbs().maxCoeff());
      CHECK((got - dp).cwiseAbs().maxCoeff() / scale < 1e-10);
    }
  }
}

TEST_CASE("endpoint weights reproduce polynomial extrapolation") {
  for (int m : {2, 5, 9}) {
    SpectralGrid g = build_grid(m, 0.9);
    for (int deg = 0; deg < m; ++deg) {
      double interp = 0.0;
      for (int j = 0; j < m; ++j)
        interp += g.endpoint_weights(j) * std::pow(g.nodes(j), deg);
      CHECK(interp == doctest::Approx(std::pow(g.nodes(m), deg)).epsilon(1e-10));
    }
  }
}

TEST_CASE("assembled operator has the Kronecker-sum structure") {
  SpinChainSpec chain{2, 1.0, 1.0, 1.0};
  LiouvilleModel model = build_model(chain, {});
  TTVector rho0 = build_pure_density_tt({0, 1});
  SpectralGrid g = build_grid(4, 0.05);
  TimeSystem sys = assemble_time_system(model.drift, rho0, g);

  Matrix gen = op_dense(model.drift);
  const int n = 16, m = 4;
  Matrix want = Matrix::Zero(n * m, n * m);
  for (int gs = 0; gs < n; ++gs)
    for (int gt = 0; gt < n; ++gt)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          Complex v(0, 0);
          if (gs == gt) v += g.diff(i, j);
          if (i == j) v += Complex(0, 1) * gen(gs, gt);
          want(gs * m + i, gt * m + j) = v;
        }
  CHECK(rel_err(op_dense(sys.op), want) < 1e-12);

  Vector want_rhs(n * m);
  Vector rho_vec = tt_dense(rho0);
  for (int gs = 0; gs < n; ++gs)
    for (int i = 0; i < m; ++i) want_rhs(gs * m + i) = rho_vec(gs) * g.rhs_weights(i);
  CHECK(rel_err(tt_dense(sys.rhs), want_rhs) < 1e-13);
}

TEST_CASE("dense solve of the collocation system matches the exact step") {
  SpinChainSpec chain{2, 1.0, 1.0, 1.0};
  std::vector<ControlTerm> terms = {{0, Axis::z}};
  LiouvilleModel model = build_model(chain, terms);
  DenseModel dm;
  dm.h0 = dense_heisenberg(2, 1, 1, 1);
  dm.controls = {dense_site_operator(2, 0, pauli_z())};

  RealVector c(1);
  c << 0.8;
  Matrix rho0 = dense_pure_density({0, 1});
  TTVector rho0_tt = build_pure_density_tt({0, 1});
  const double tau = 0.01;

  double prev_err = 1.0;
  for (int m : {2, 4, 8}) {
    SpectralGrid g = build_grid(m, tau);
    TimeSystem sys = assemble_time_system(interval_generator(model, c), rho0_tt, g);
    Matrix a = op_dense(sys.op);
    Vector x = a.partialPivLu().solve(tt_dense(sys.rhs));

    // Value at the last node lives at time index m-1.
    const int n = 16;
    Vector endpoint(n);
    for (int gs = 0; gs < n; ++gs) endpoint(gs) = x(gs * m + (m - 1));
    Vector want = to_fused_order(dense_vec(dense_step(dm, c, rho0, tau)), 2);
    const double err = rel_err(endpoint, want);
    CHECK(err < (m == 2 ? 1e-4 : 1e-6));
    if (m > 2) CHECK(err < prev_err * 0.9);
    prev_err = err;
  }
}
