#include "ttqc/dense_reference.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace ttqc {

namespace {

constexpr Complex kI(0.0, 1.0);

int dim_of(int sites) {
  if (sites < 1 || sites > 12)
    throw std::invalid_argument("dense reference limited to 1..12 sites");
  return 1 << sites;
}

int sites_of_dim(Eigen::Index n) {
  int sites = 0;
  while ((Eigen::Index(1) << sites) < n) ++sites;
  if ((Eigen::Index(1) << sites) != n)
    throw std::invalid_argument("matrix dimension is not a power of two");
  return sites;
}

// Pair index (i, j) -> i * 2^d + j corresponding to the fused sitewise index
// sum_k (2 i_k + j_k) 4^(d-1-k).
std::vector<std::int64_t> pair_index_of_fused(int sites) {
  const std::int64_t total = std::int64_t(1) << (2 * sites);
  std::vector<std::int64_t> map(total);
  for (std::int64_t g = 0; g < total; ++g) {
    std::int64_t row = 0, col = 0;
    for (int k = 0; k < sites; ++k) {
      const int f = static_cast<int>((g >> (2 * (sites - 1 - k))) & 3);
      row = (row << 1) | (f >> 1);
      col = (col << 1) | (f & 1);
    }
    map[g] = (row << sites) | col;
  }
  return map;
}

struct EigenStep {
  Matrix v;        // eigenvectors of H(c)
  RealVector lam;  // eigenvalues
  Matrix u;        // exp(-i tau H(c))
};

EigenStep eigen_step(const Matrix& h, double tau) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("dense_step: eigendecomposition failed");
  EigenStep out;
  out.v = es.eigenvectors();
  out.lam = es.eigenvalues();
  Vector phase(out.lam.size());
  for (Eigen::Index p = 0; p < out.lam.size(); ++p)
    phase(p) = std::exp(-kI * tau * out.lam(p));
  out.u = out.v * phase.asDiagonal() * out.v.adjoint();
  return out;
}

// Frechet derivative of U = exp(-i tau H) in the direction Hk, from the
// divided differences of g(x) = exp(-i tau x) on the spectrum of H.
Matrix step_derivative(const EigenStep& es, const Matrix& hk, double tau) {
  const Eigen::Index n = es.lam.size();
  Matrix inner = es.v.adjoint() * hk * es.v;
  for (Eigen::Index p = 0; p < n; ++p) {
    const Complex gp = std::exp(-kI * tau * es.lam(p));
    for (Eigen::Index q = 0; q < n; ++q) {
      const double dl = es.lam(p) - es.lam(q);
      Complex dd;
      if (std::abs(dl) < 1e-10) {
        // Mean-value form keeps the limit smooth through near degeneracies.
        dd = -kI * tau * std::exp(-kI * tau * 0.5 * (es.lam(p) + es.lam(q)));
      } else {
        dd = (gp - std::exp(-kI * tau * es.lam(q))) / dl;
      }
      inner(p, q) *= dd;
    }
  }
  return es.v * inner * es.v.adjoint();
}

}  // namespace

Matrix pauli_x() {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

Matrix pauli_y() {
  Matrix s(2, 2);
  s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return s;
}

Matrix pauli_z() {
  Matrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

Matrix dense_site_operator(int sites, int site, const Matrix& op) {
  if (site < 0 || site >= sites)
    throw std::invalid_argument("dense_site_operator: site out of range");
  if (op.rows() != 2 || op.cols() != 2)
    throw std::invalid_argument("dense_site_operator: op must be 2x2");
  dim_of(sites);
  Matrix out = Matrix::Identity(1, 1);
  for (int k = 0; k < sites; ++k) {
    const Matrix& f = (k == site) ? op : Matrix(Matrix::Identity(2, 2));
    out = Eigen::kroneckerProduct(out, f).eval();
  }
  return out;
}

Matrix dense_heisenberg(int sites, double jx, double jy, double jz) {
  const int n = dim_of(sites);
  Matrix h = Matrix::Zero(n, n);
  const Matrix sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  for (int k = 0; k + 1 < sites; ++k) {
    h += jx * (dense_site_operator(sites, k, sx) * dense_site_operator(sites, k + 1, sx));
    h += jy * (dense_site_operator(sites, k, sy) * dense_site_operator(sites, k + 1, sy));
    h += jz * (dense_site_operator(sites, k, sz) * dense_site_operator(sites, k + 1, sz));
  }
  return h;
}

Matrix dense_pure_density(const std::vector<int>& bits) {
  const int sites = static_cast<int>(bits.size());
  const int n = dim_of(sites);
  std::int64_t idx = 0;
  for (int b : bits) {
    if (b != 0 && b != 1)
      throw std::invalid_argument("dense_pure_density: bits must be 0 or 1");
    idx = (idx << 1) | b;
  }
  Matrix rho = Matrix::Zero(n, n);
  rho(idx, idx) = 1.0;
  return rho;
}

Vector dense_vec(const Matrix& rho) {
  const Eigen::Index n = rho.rows();
  if (rho.cols() != n) throw std::invalid_argument("dense_vec: square input");
  Vector v(n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = rho(i, j);
  return v;
}

Matrix dense_unvec(const Vector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(v.size()))));
  if (n * n != v.size()) throw std::invalid_argument("dense_unvec: not square");
  Matrix rho(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) rho(i, j) = v(i * n + j);
  return rho;
}

Vector to_fused_order(const Vector& pair_vec, int sites) {
  const auto map = pair_index_of_fused(sites);
  if (pair_vec.size() != static_cast<Eigen::Index>(map.size()))
    throw std::invalid_argument("to_fused_order: size mismatch");
  Vector out(pair_vec.size());
  for (std::size_t g = 0; g < map.size(); ++g) out(g) = pair_vec(map[g]);
  return out;
}

Vector to_pair_order(const Vector& fused_vec, int sites) {
  const auto map = pair_index_of_fused(sites);
  if (fused_vec.size() != static_cast<Eigen::Index>(map.size()))
    throw std::invalid_argument("to_pair_order: size mismatch");
  Vector out(fused_vec.size());
  for (std::size_t g = 0; g < map.size(); ++g) out(map[g]) = fused_vec(g);
  return out;
}

Matrix dense_superoperator(const Matrix& h, int sites) {
  const int n = dim_of(sites);
  if (h.rows() != n || h.cols() != n)
    throw std::invalid_argument("dense_superoperator: dimension mismatch");
  Matrix eye = Matrix::Identity(n, n);
  Matrix s_pair = Eigen::kroneckerProduct(h, eye).eval() -
                  Eigen::kroneckerProduct(eye, h.transpose()).eval();
  const auto map = pair_index_of_fused(sites);
  Matrix out(s_pair.rows(), s_pair.cols());
  for (std::size_t r = 0; r < map.size(); ++r)
    for (std::size_t c = 0; c < map.size(); ++c)
      out(r, c) = s_pair(map[r], map[c]);
  return out;
}

Matrix dense_hamiltonian(const DenseModel& m, const RealVector& c) {
  if (c.size() != static_cast<Eigen::Index>(m.controls.size()))
    throw std::invalid_argument("dense_hamiltonian: control count mismatch");
  Matrix h = m.h0;
  for (Eigen::Index k = 0; k < c.size(); ++k) h += c(k) * m.controls[k];
  return h;
}

Matrix dense_commutator(const DenseModel& m, const RealVector& c,
                        const Matrix& rho) {
  Matrix h = dense_hamiltonian(m, c);
  return h * rho - rho * h;
}

Matrix dense_step(const DenseModel& m, const RealVector& c, const Matrix& rho,
                  double tau) {
  EigenStep es = eigen_step(dense_hamiltonian(m, c), tau);
  return es.u * rho * es.u.adjoint();
}

Matrix dense_propagate(const DenseModel& m, const RealMatrix& pulses,
                       const Matrix& rho0, double tau) {
  Matrix rho = rho0;
  for (Eigen::Index nstep = 0; nstep < pulses.rows(); ++nstep)
    rho = dense_step(m, pulses.row(nstep).transpose(), rho, tau);
  return rho;
}

double dense_fidelity(const Matrix& target, const Matrix& rho) {
  return (target.adjoint() * rho).trace().real();
}

RealMatrix dense_gradient_fd(const DenseModel& m, const RealMatrix& pulses,
                             const Matrix& rho0, const Matrix& target,
                             double tau, double delta) {
  RealMatrix grad(pulses.rows(), pulses.cols());
  for (Eigen::Index nstep = 0; nstep < pulses.rows(); ++nstep) {
    for (Eigen::Index k = 0; k < pulses.cols(); ++k) {
      RealMatrix up = pulses, dn = pulses;
      up(nstep, k) += delta;
      dn(nstep, k) -= delta;
      const double fu = dense_fidelity(target, dense_propagate(m, up, rho0, tau));
      const double fd = dense_fidelity(target, dense_propagate(m, dn, rho0, tau));
      grad(nstep, k) = (fu - fd) / (2.0 * delta);
    }
  }
  return grad;
}

RealMatrix dense_adjoint_gradient(const DenseModel& m, const RealMatrix& pulses,
                                  const Matrix& rho0, const Matrix& target,
                                  double tau) {
  const Eigen::Index nsteps = pulses.rows();
  const Eigen::Index nctrl = pulses.cols();

  std::vector<Matrix> rho(nsteps + 1);
  std::vector<EigenStep> steps(nsteps);
  rho[0] = rho0;
  for (Eigen::Index nstep = 0; nstep < nsteps; ++nstep) {
    steps[nstep] = eigen_step(
        dense_hamiltonian(m, pulses.row(nstep).transpose()), tau);
    rho[nstep + 1] = steps[nstep].u * rho[nstep] * steps[nstep].u.adjoint();
  }

  RealMatrix grad(nsteps, nctrl);
  Matrix lam = target;
  for (Eigen::Index nstep = nsteps - 1; nstep >= 0; --nstep) {
    const EigenStep& es = steps[nstep];
    for (Eigen::Index k = 0; k < nctrl; ++k) {
      Matrix du = step_derivative(es, m.controls[k], tau);
      // d rho' = du rho u' + u rho du'; with Hermitian lam and rho the two
      // traces are conjugate.
      const Complex z = (lam * du * rho[nstep] * es.u.adjoint()).trace();
      grad(nstep, k) = 2.0 * z.real();
    }
    lam = es.u.adjoint() * lam * es.u;
  }
  return grad;
}

}  // namespace ttqc
