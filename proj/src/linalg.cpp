#include "mcd/linalg.hpp"

#include <cmath>
#include <string>

namespace mcd {

namespace {

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(std::string(what) + ": matrix must be square and non-empty");
}

void check_symmetric(const Matrix& m, const char* what) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    throw Error(std::string(what) + ": matrix not symmetric (deviation " + std::to_string(asym) + ")");
}

}  // namespace

PdsMatrix::PdsMatrix(const Matrix& m) {
  check_square(m, "PdsMatrix");
  check_symmetric(m, "PdsMatrix");
  mat_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(mat_);
  eigval_ = eig.eigenvalues();
  eigvec_ = eig.eigenvectors();
  const double largest = eigval_(eigval_.size() - 1);
  if (largest <= 0.0 || eigval_(0) <= kPdsEigRatio * largest)
    throw DegenerateError("PdsMatrix: matrix is not positive definite (eigenvalues [" +
                          std::to_string(eigval_(0)) + ", " + std::to_string(largest) + "])");
}

double PdsMatrix::det() const { return eigval_.prod(); }

Matrix PdsMatrix::inverse() const {
  return eigvec_ * eigval_.cwiseInverse().asDiagonal() * eigvec_.transpose();
}

Vector PdsMatrix::solve(const Vector& b) const {
  return eigvec_ * (eigval_.cwiseInverse().asDiagonal() * (eigvec_.transpose() * b));
}

PdsMatrix pds_sqrt(const PdsMatrix& s) {
  const Matrix root =
      s.eigenvectors() * s.eigenvalues().cwiseSqrt().asDiagonal() * s.eigenvectors().transpose();
  return PdsMatrix(root);
}

DetTraceWitness det_trace_test(const Matrix& s1, const PdsMatrix& s2) {
  check_square(s1, "det_trace_test");
  check_symmetric(s1, "det_trace_test");
  if (s1.rows() != s2.dim()) throw Error("det_trace_test: dimension mismatch");
  const Matrix diff = s1 - s2.mat();
  const double t = (s2.inverse() * diff).trace();
  return DetTraceWitness{t, psd_det(s1), s2.det()};
}

double mahalanobis_sq(const Vector& x, const Vector& mu, const PdsMatrix& s) {
  if (x.size() != mu.size() || x.size() != s.dim())
    throw Error("mahalanobis_sq: dimension mismatch");
  const Vector d = x - mu;
  return d.dot(s.solve(d));
}

double psd_det(const Matrix& s) {
  check_square(s, "psd_det");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  double det = 1.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
    det *= std::max(0.0, eig.eigenvalues()(i));
  return det;
}

bool is_pds(const Matrix& s, double ratio) {
  if (s.rows() != s.cols() || s.rows() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  const double largest = eig.eigenvalues()(eig.eigenvalues().size() - 1);
  return largest > 0.0 && eig.eigenvalues()(0) > ratio * largest;
}

Vector vech(const Matrix& sym) {
  check_square(sym, "vech");
  const int k = static_cast<int>(sym.rows());
  Vector v(k * (k + 1) / 2);
  int idx = 0;
  for (int j = 0; j < k; ++j)
    for (int i = j; i < k; ++i) v(idx++) = sym(i, j);
  return v;
}

Matrix unvech(const Vector& v, int k) {
  if (v.size() != k * (k + 1) / 2) throw Error("unvech: length does not match dimension");
  Matrix m(k, k);
  int idx = 0;
  for (int j = 0; j < k; ++j)
    for (int i = j; i < k; ++i) {
      m(i, j) = v(idx);
      m(j, i) = v(idx);
      ++idx;
    }
  return m;
}

}  // namespace mcd
