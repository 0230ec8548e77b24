#pragma once

#include <random>

#include <Eigen/SVD>

#include "kcontract/numkernel.hpp"

namespace kc::test {

inline Matrix gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline Matrix random_symmetric(std::mt19937_64& rng, int n) { return symmetrize(gaussian(rng, n, n)); }

// Shifted so every eigenvalue has real part <= -margin.
inline Matrix random_hurwitz(std::mt19937_64& rng, int n, double margin = 0.5) {
  Matrix a = gaussian(rng, n, n);
  const double top = eigenvalues(a)[0].real();
  return a - (top + margin) * Matrix::Identity(n, n);
}

inline Matrix random_nonsingular(std::mt19937_64& rng, int n) {
  return gaussian(rng, n, n) + 2.0 * std::sqrt(static_cast<double>(n)) * Matrix::Identity(n, n);
}

// sigma_min / sigma_max of [B, AB, ..., A^(n-1) B]
inline double controllability_conditioning(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  Matrix c(n, n * b.cols());
  Matrix blk = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    c.middleCols(i * b.cols(), b.cols()) = blk;
    blk = a * blk;
  }
  const Vector sv = Eigen::JacobiSVD<Matrix>(c).singularValues();
  return sv(n - 1) / sv(0);
}

inline Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

}  // namespace kc::test
