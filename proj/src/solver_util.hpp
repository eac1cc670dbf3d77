#pragma once

#include <Eigen/Dense>

#include "mcd/linalg.hpp"

namespace mcd::detail {

// Eigendecomposition of a candidate scatter matrix with a singularity gate;
// shared by the subsample and functional solvers.
struct Shape {
  Vector eigval;
  Matrix eigvec;
  bool degenerate;

  explicit Shape(const Matrix& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
    eigval = eig.eigenvalues();
    eigvec = eig.eigenvectors();
    const double largest = eigval(eigval.size() - 1);
    degenerate = !(largest > 0.0 && eigval(0) > kPdsEigRatio * largest);
  }

  double det() const { return eigval.prod(); }

  double d2(const Vector& x, const Vector& mu) const {
    const Vector z = eigvec.transpose() * (x - mu);
    return (z.array().square() / eigval.array()).sum();
  }
};

}  // namespace mcd::detail
