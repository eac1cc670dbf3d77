#pragma once

#include <Eigen/Dense>

#include "mcd/error.hpp"

namespace mcd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative eigenvalue gate below which a symmetric matrix is treated as
// singular. Chosen so downstream determinant ratios stay meaningful.
inline constexpr double kPdsEigRatio = 1e-12;

// Positive definite symmetric matrix of small order. Construction validates
// symmetry (1e-12, relative to the largest entry for badly scaled inputs)
// and positive definiteness (smallest eigenvalue > 1e-12 x largest), and
// caches the eigendecomposition, so determinant, inverse, square root and
// Mahalanobis solves are cheap afterwards.
class PdsMatrix {
 public:
  // 1x1 identity; placeholder so aggregates holding a PdsMatrix can be
  // default-constructed before being filled.
  PdsMatrix() : mat_(Matrix::Identity(1, 1)), eigval_(Vector::Ones(1)), eigvec_(Matrix::Identity(1, 1)) {}
  explicit PdsMatrix(const Matrix& m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }
  const Vector& eigenvalues() const { return eigval_; }
  const Matrix& eigenvectors() const { return eigvec_; }

  // Determinant as the product of eigenvalues.
  double det() const;
  Matrix inverse() const;
  Vector solve(const Vector& b) const;

 private:
  Matrix mat_;
  Vector eigval_;
  Matrix eigvec_;
};

// Unique symmetric PDS square root G with G*G = S.
PdsMatrix pds_sqrt(const PdsMatrix& s);

// Witness for the determinant/trace ordering lemma: whenever the trace
// statistic Tr(S2^{-1}(S1-S2)) is negative, det(S1) < det(S2) (and <= under
// a non-strict trace). Exposed as data so property suites can assert it.
struct DetTraceWitness {
  double trace_stat;
  double det1;
  double det2;
};

DetTraceWitness det_trace_test(const Matrix& s1, const PdsMatrix& s2);

// Squared Mahalanobis distance (x-mu)' S^{-1} (x-mu).
double mahalanobis_sq(const Vector& x, const Vector& mu, const PdsMatrix& s);

// Determinant of a symmetric non-negative definite matrix via eigenvalues,
// with tiny negative eigenvalues clamped to zero.
double psd_det(const Matrix& s);

// True when the smallest eigenvalue exceeds ratio x largest (and largest > 0).
bool is_pds(const Matrix& s, double ratio = kPdsEigRatio);

// Half-vectorization: lower triangle, column-major. The inverse rebuilds the
// full symmetric matrix. This ordering is a fixed convention; Jacobian and
// CLT matrices depend on it.
Vector vech(const Matrix& sym);
Matrix unvech(const Vector& v, int k);

// Length of [m; vech(G); r] for dimension k.
inline int theta_dim(int k) { return k + k * (k + 1) / 2 + 1; }

}  // namespace mcd
