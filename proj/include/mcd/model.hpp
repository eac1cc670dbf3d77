#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcd/linalg.hpp"

namespace mcd {

// Raw sample: one row per point.
struct Dataset {
  Matrix points;  // n x k

  int n() const { return static_cast<int>(points.rows()); }
  int k() const { return static_cast<int>(points.cols()); }

  void validate() const;
};

// Discrete probability measure: atoms with strictly positive weights summing
// to one. Duplicate atom locations are allowed. Represents empirical
// measures, quadrature grids and point-mass perturbations uniformly.
struct WeightedMeasure {
  Matrix points;   // n x k
  Vector weights;  // n

  int n() const { return static_cast<int>(points.rows()); }
  int k() const { return static_cast<int>(points.cols()); }
  double total() const { return weights.sum(); }

  void validate() const;

  static WeightedMeasure uniform(const Dataset& d);
  // (1-eps) * this + eps * point mass at x.
  WeightedMeasure perturbed(const Vector& x, double eps) const;
};

// Per-atom trimming weights phi_i in [0,1]; membership in the class of
// admissible trimmings requires mass = sum phi_i w_i >= gamma.
struct TrimmingWeights {
  Vector values;

  double mass(const WeightedMeasure& p) const { return values.dot(p.weights); }
  void validate(const WeightedMeasure& p, double gamma) const;
};

struct Ellipsoid {
  Vector mu;
  PdsMatrix sigma;
  double rho;

  bool contains(const Vector& x) const { return mahalanobis_sq(x, mu, sigma) <= rho * rho; }
};

// Parameter point theta = (m, G, r) with G the symmetric PDS square root of
// the scatter matrix. Vectorized as [m; vech(G); r].
struct Theta {
  Vector m = Vector::Zero(1);
  PdsMatrix G{};
  double r = 1.0;

  int k() const { return static_cast<int>(m.size()); }
  int p() const { return theta_dim(k()); }
  Vector vectorize() const;
  static Theta devectorize(const Vector& v, int k);
};

struct CertificateReport {
  bool subsample_size_ok = true;
  bool separating_ellipsoid_ok = true;
  bool mass_ok = true;
  int boundary_atoms = 0;
  double max_violation = 0.0;
  // Functional-side extras.
  int fractional_atoms = 0;
  std::string boundary_case;  // "empty" | "full" | "fractional" | "mixed"
  bool degenerate = false;

  bool passed() const {
    return subsample_size_ok && separating_ellipsoid_ok && mass_ok && !degenerate;
  }
};

// Solution bundle for both the estimator (index subsample) and the
// functional (per-atom trimming weights).
struct McdFit {
  std::string method;  // "exact" | "cstep" | "functional" | "exact_functional"
  double gamma = 0.5;
  std::uint64_t seed = 0;
  Vector T;
  Matrix C;
  double radius = 0.0;
  double det = 0.0;
  std::vector<int> subsample;            // estimator path
  std::optional<TrimmingWeights> weights;  // functional path
  CertificateReport certificate;
  bool degenerate = false;
  int iterations = 0;
};

struct TrimmedMoments {
  double mass;
  Vector T;
  Matrix C;
};

// Weighted trimmed mean and covariance. C is normalized by the trimmed mass,
// so scaling phi by a constant leaves (T, C) unchanged.
TrimmedMoments trimmed_moments(const WeightedMeasure& p, const TrimmingWeights& phi);

// Smallest Mahalanobis radius s among atom distances such that the closed
// ellipsoid E(center, shape, s) holds mass >= gamma; equivalently the
// weighted upper gamma-quantile of the atom distances (ties grouped).
double radius(const WeightedMeasure& p, const Vector& center, const PdsMatrix& shape,
              double gamma);

Dataset affine_map(const Dataset& d, const Matrix& a, const Vector& b);
WeightedMeasure affine_map(const WeightedMeasure& p, const Matrix& a, const Vector& b);

// CSV ingestion: one row per point, k numeric columns, optional weights
// column named "weight" (requires a header).
struct CsvData {
  Matrix points;
  std::optional<Vector> weights;
};

CsvData read_csv(const std::string& path, bool has_header);
void write_csv(const std::string& path, const std::string& content);

// Write content to path via a temp file + atomic rename (no partial files).
void write_atomic(const std::string& path, const std::string& content);

}  // namespace mcd
