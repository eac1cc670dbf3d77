#pragma once

#include "mcd/linalg.hpp"
#include "mcd/model.hpp"
#include "mcd/rng.hpp"

namespace testutil {

using mcd::Matrix;
using mcd::Vector;

inline Matrix random_matrix(mcd::Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector random_vector(mcd::Rng& rng, int k) {
  Vector v(k);
  for (int i = 0; i < k; ++i) v(i) = rng.normal();
  return v;
}

// Random PDS matrix A A' + eps I.
inline Matrix random_pds(mcd::Rng& rng, int k, double ridge = 0.1) {
  const Matrix a = random_matrix(rng, k, k);
  return a * a.transpose() + ridge * Matrix::Identity(k, k);
}

// Random nonsingular matrix with singular values in [1, cond].
inline Matrix random_conditioned(mcd::Rng& rng, int k, double cond) {
  Eigen::JacobiSVD<Matrix> svd1(random_matrix(rng, k, k), Eigen::ComputeFullU);
  Eigen::JacobiSVD<Matrix> svd2(random_matrix(rng, k, k), Eigen::ComputeFullU);
  Vector s(k);
  for (int i = 0; i < k; ++i) s(i) = 1.0 + (cond - 1.0) * rng.uniform01();
  s(0) = 1.0;
  if (k > 1) s(k - 1) = cond;
  return svd1.matrixU() * s.asDiagonal() * svd2.matrixU().transpose();
}

inline mcd::Dataset random_gaussian_dataset(mcd::Rng& rng, int n, int k) {
  return mcd::Dataset{random_matrix(rng, n, k)};
}

}  // namespace testutil
