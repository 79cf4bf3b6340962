#pragma once

#include <random>
#include <vector>

#include "ttqc/tensor_train.hpp"

namespace ttqc::testutil {

inline TTOperator random_op(const std::vector<int>& modes,
                            const std::vector<int>& ranks,
                            std::mt19937_64& rng) {
  const int d = static_cast<int>(modes.size());
  std::vector<int> bonds(d + 1, 1);
  for (int k = 0; k < d - 1; ++k) bonds[k + 1] = ranks[k];
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TTOpBlock> blocks;
  for (int k = 0; k < d; ++k) {
    TTOpBlock w(bonds[k], modes[k], modes[k], bonds[k + 1]);
    for (int b = 0; b < bonds[k + 1]; ++b)
      for (int t = 0; t < modes[k]; ++t)
        for (int s = 0; s < modes[k]; ++s)
          for (int a = 0; a < bonds[k]; ++a)
            w.at(a, s, t, b) = Complex(normal(rng), normal(rng));
    blocks.push_back(std::move(w));
  }
  return TTOperator(std::move(blocks));
}

inline double rel_err(const Vector& got, const Vector& want) {
  const double scale = want.norm();
  if (scale == 0.0) return got.norm();
  return (got - want).norm() / scale;
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  const double scale = want.norm();
  if (scale == 0.0) return got.norm();
  return (got - want).norm() / scale;
}

}  // namespace ttqc::testutil
