#include "ttqc/spin_chain.hpp"

#include <stdexcept>

namespace ttqc {

namespace {

constexpr Complex kI(0.0, 1.0);

struct Pauli2 {
  Complex m[2][2];
};

Pauli2 pauli(Axis axis) {
  switch (axis) {
    case Axis::x:
      return {{{0.0, 1.0}, {1.0, 0.0}}};
    case Axis::y:
      return {{{0.0, -kI}, {kI, 0.0}}};
    case Axis::z:
      return {{{1.0, 0.0}, {0.0, -1.0}}};
  }
  throw std::invalid_argument("pauli: bad axis");
}

void put(TTOpBlock& w, int a, int b, const Pauli2& p, Complex scale = 1.0) {
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) w.at(a, s, t, b) = scale * p.m[s][t];
}

void put_identity(TTOpBlock& w, int a, int b) {
  w.at(a, 0, 0, b) = 1.0;
  w.at(a, 1, 1, b) = 1.0;
}

// Bond states of the exchange MPO, read left to right:
//   0 = pair complete, 1..3 = first factor (x, y, z) placed, 4 = nothing yet.
TTOpBlock exchange_interior(const SpinChainSpec& c) {
  TTOpBlock w(5, 2, 2, 5);
  put_identity(w, 0, 0);
  put(w, 1, 0, pauli(Axis::x), c.jx);
  put(w, 2, 0, pauli(Axis::y), c.jy);
  put(w, 3, 0, pauli(Axis::z), c.jz);
  put(w, 4, 1, pauli(Axis::x));
  put(w, 4, 2, pauli(Axis::y));
  put(w, 4, 3, pauli(Axis::z));
  put_identity(w, 4, 4);
  return w;
}

}  // namespace

TTOperator build_hamiltonian_mpo(const SpinChainSpec& chain) {
  if (chain.sites < 1)
    throw std::invalid_argument("build_hamiltonian_mpo: need at least 1 site");
  if (chain.sites == 1) {
    // No pairs: the zero operator.
    return TTOperator({TTOpBlock(1, 2, 2, 1)});
  }
  TTOpBlock inner = exchange_interior(chain);

  std::vector<TTOpBlock> blocks;
  blocks.reserve(chain.sites);

  TTOpBlock first(1, 2, 2, 5);
  for (int b = 0; b < 5; ++b)
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) first.at(0, s, t, b) = inner.at(4, s, t, b);
  blocks.push_back(std::move(first));

  for (int k = 1; k + 1 < chain.sites; ++k) blocks.push_back(inner);

  TTOpBlock last(5, 2, 2, 1);
  for (int a = 0; a < 5; ++a)
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) last.at(a, s, t, 0) = inner.at(a, s, t, 0);
  blocks.push_back(std::move(last));

  return TTOperator(std::move(blocks));
}

TTOperator build_site_mpo(int sites, const ControlTerm& term) {
  if (term.site < 0 || term.site >= sites)
    throw std::invalid_argument("build_site_mpo: site out of range");
  std::vector<TTOpBlock> blocks;
  blocks.reserve(sites);
  for (int k = 0; k < sites; ++k) {
    TTOpBlock w(1, 2, 2, 1);
    if (k == term.site) {
      put(w, 0, 0, pauli(term.axis));
    } else {
      put_identity(w, 0, 0);
    }
    blocks.push_back(std::move(w));
  }
  return TTOperator(std::move(blocks));
}

namespace {

// rho -> H rho: acts on the row bit of the fused digit f = 2i + j.
TTOperator lift_left(const TTOperator& h) {
  std::vector<TTOpBlock> blocks;
  blocks.reserve(h.order());
  for (int k = 0; k < h.order(); ++k) {
    const TTOpBlock& w = h.block(k);
    TTOpBlock out(w.left(), 4, 4, w.right());
    for (int b = 0; b < w.right(); ++b)
      for (int a = 0; a < w.left(); ++a)
        for (int i = 0; i < 2; ++i)
          for (int ip = 0; ip < 2; ++ip)
            for (int j = 0; j < 2; ++j)
              out.at(a, 2 * i + j, 2 * ip + j, b) = w.at(a, i, ip, b);
    blocks.push_back(std::move(out));
  }
  return TTOperator(std::move(blocks));
}

// rho -> rho H: acts on the column bit, with the transpose of each factor.
TTOperator lift_right(const TTOperator& h) {
  std::vector<TTOpBlock> blocks;
  blocks.reserve(h.order());
  for (int k = 0; k < h.order(); ++k) {
    const TTOpBlock& w = h.block(k);
    TTOpBlock out(w.left(), 4, 4, w.right());
    for (int b = 0; b < w.right(); ++b)
      for (int a = 0; a < w.left(); ++a)
        for (int j = 0; j < 2; ++j)
          for (int jp = 0; jp < 2; ++jp)
            for (int i = 0; i < 2; ++i)
              out.at(a, 2 * i + j, 2 * i + jp, b) = w.at(a, jp, j, b);
    blocks.push_back(std::move(out));
  }
  return TTOperator(std::move(blocks));
}

}  // namespace

TTOperator lift_superoperator(const TTOperator& h) {
  for (int k = 0; k < h.order(); ++k)
    if (h.row_mode(k) != 2 || h.col_mode(k) != 2)
      throw std::invalid_argument("lift_superoperator: expects a spin-1/2 MPO");
  TTOperator diff = op_axpy(Complex(-1.0, 0.0), lift_right(h), lift_left(h));
  return op_round(diff, {1e-14, 0});
}

TTOperator build_augmented_operator(const TTOperator& gen, const TTOperator& ctrl) {
  if (gen.row_modes() != ctrl.row_modes() || gen.col_modes() != ctrl.col_modes())
    throw std::invalid_argument("build_augmented_operator: mode mismatch");
  TTOpBlock eye(1, 2, 2, 1);
  eye.at(0, 0, 0, 0) = 1.0;
  eye.at(0, 1, 1, 0) = 1.0;
  TTOpBlock feed(1, 2, 2, 1);  // |0><1|: routes the state into the derivative
  feed.at(0, 0, 1, 0) = 1.0;
  return op_axpy(Complex(1.0, 0.0), op_prepend_block(ctrl, feed),
                 op_prepend_block(gen, eye));
}

TTVector build_pure_density_tt(const std::vector<int>& bits) {
  if (bits.empty())
    throw std::invalid_argument("build_pure_density_tt: no sites");
  std::vector<TTBlock> blocks;
  blocks.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1)
      throw std::invalid_argument("build_pure_density_tt: bits must be 0 or 1");
    TTBlock blk(1, 4, 1);
    blk.at(0, b == 0 ? 0 : 3, 0) = 1.0;
    blocks.push_back(std::move(blk));
  }
  return TTVector(std::move(blocks));
}

namespace {

TTVector diagonal_weight_tt(int sites, int special_site, Complex w0, Complex w3) {
  std::vector<TTBlock> blocks;
  blocks.reserve(sites);
  for (int k = 0; k < sites; ++k) {
    TTBlock blk(1, 4, 1);
    if (k == special_site) {
      blk.at(0, 0, 0) = w0;
      blk.at(0, 3, 0) = w3;
    } else {
      blk.at(0, 0, 0) = 1.0;
      blk.at(0, 3, 0) = 1.0;
    }
    blocks.push_back(std::move(blk));
  }
  return TTVector(std::move(blocks));
}

}  // namespace

Complex tt_trace(const TTVector& rho) {
  for (int m : rho.modes())
    if (m != 4) throw std::invalid_argument("tt_trace: expects fused mode 4");
  return tt_dot(diagonal_weight_tt(rho.order(), -1, 1.0, 1.0), rho);
}

TTVector hermitian_adjoint(const TTVector& rho) {
  std::vector<TTBlock> blocks;
  blocks.reserve(rho.order());
  for (int k = 0; k < rho.order(); ++k) {
    const TTBlock& b = rho.block(k);
    if (b.mode() != 4)
      throw std::invalid_argument("hermitian_adjoint: expects fused mode 4");
    TTBlock out(b.left(), 4, b.right());
    static constexpr int swap_f[4] = {0, 2, 1, 3};
    for (int bb = 0; bb < b.right(); ++bb)
      for (int f = 0; f < 4; ++f)
        for (int a = 0; a < b.left(); ++a)
          out.at(a, swap_f[f], bb) = std::conj(b.at(a, f, bb));
    blocks.push_back(std::move(out));
  }
  return TTVector(std::move(blocks));
}

double site_sz(const TTVector& rho, int site) {
  if (site < 0 || site >= rho.order())
    throw std::invalid_argument("site_sz: site out of range");
  return std::real(tt_dot(diagonal_weight_tt(rho.order(), site, 1.0, -1.0), rho));
}

LiouvilleModel build_model(const SpinChainSpec& chain,
                           const std::vector<ControlTerm>& controls) {
  if (chain.sites < 1)
    throw std::invalid_argument("build_model: need at least 1 site");
  LiouvilleModel model;
  model.chain = chain;
  model.controls = controls;
  model.drift = lift_superoperator(build_hamiltonian_mpo(chain));
  model.control_ops.reserve(controls.size());
  for (const ControlTerm& term : controls)
    model.control_ops.push_back(
        lift_superoperator(build_site_mpo(chain.sites, term)));
  return model;
}

TTOperator interval_generator(const LiouvilleModel& model, const RealVector& c) {
  if (c.size() != static_cast<Eigen::Index>(model.control_ops.size()))
    throw std::invalid_argument("interval_generator: control count mismatch");
  TTOperator gen = model.drift;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (c(k) == 0.0) continue;
    gen = op_axpy(Complex(c(k), 0.0), model.control_ops[k], gen);
  }
  return op_round(gen, {1e-14, 0});
}

}  // namespace ttqc
