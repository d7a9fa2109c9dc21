#pragma once

#include <cstdint>
#include <numeric>
#include <random>

#include "qls/tensor.hpp"

namespace qls {

// Seeded randomness for simulations and tests. One instance = one stream;
// identical seeds replay identical draws within a build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double gaussian() { return normal_(gen_); }

  Complex complex_gaussian() { return {normal_(gen_), normal_(gen_)}; }

  Matrix gaussian_matrix(Index rows, Index cols) {
    Matrix g(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) g(i, j) = complex_gaussian();
    return g;
  }

  Vector random_state_vector(Index d) {
    Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = complex_gaussian();
    v /= v.norm();
    return v;
  }

  // Full-rank density matrix G G^dag / tr.
  Matrix random_density(Index d) { return random_density_rank(d, d); }

  Matrix random_density_rank(Index d, Index rank) {
    Matrix g = gaussian_matrix(d, rank);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return hermitize(rho);
  }

  // Haar-ish random rank-r projector via QR of a Gaussian block.
  Matrix random_projector_matrix(Index d, Index rank) {
    Matrix g = gaussian_matrix(d, rank);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, rank);
    return hermitize(q * q.adjoint());
  }

  std::vector<int> permutation(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      std::uniform_int_distribution<int> pick(0, i);
      std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(pick(gen_))]);
    }
    return p;
  }

  int uniform_int(int lo, int hi) { // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace qls
