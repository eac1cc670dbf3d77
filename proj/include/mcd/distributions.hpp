#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mcd/model.hpp"

namespace mcd {

// Population input: an elliptical family, a mixture of specs, or a fixed
// atom list. Elliptical members are generated/discretized in standardized
// coordinates and mapped by (location, scatter^{1/2}).
struct PopulationSpec {
  enum class Family { Gaussian, StudentT, UniformBall, Mixture, CustomAtoms };

  Family family = Family::Gaussian;
  int dim = 1;
  Vector location;  // elliptical families
  Matrix scatter;   // elliptical families, PDS
  double nu = 3.0;  // student_t degrees of freedom (nu <= 2 allowed)
  std::vector<std::pair<double, PopulationSpec>> parts;  // mixture
  Matrix atoms;         // custom_atoms
  Vector atom_weights;  // custom_atoms

  void validate() const;

  static PopulationSpec standard_gaussian(int k);
  static PopulationSpec gaussian(const Vector& loc, const Matrix& scatter);
  static PopulationSpec student_t(double nu, const Vector& loc, const Matrix& scatter);
  static PopulationSpec uniform_ball(const Vector& loc, const Matrix& scatter);
  static PopulationSpec point_mass(const Vector& x);
  static PopulationSpec custom_atoms(const Matrix& points, const Vector& weights);
  static PopulationSpec mixture(std::vector<std::pair<double, PopulationSpec>> parts);

  static Family family_from_string(const std::string& name);
  static std::string family_to_string(Family f);
};

// i.i.d. draws, deterministic given (seed, stream).
Dataset sample(const PopulationSpec& spec, int n, std::uint64_t seed, std::uint64_t stream = 0);

struct GridResolution {
  int radial_cells = 0;    // 0: per-dimension default
  int nodes_per_cell = 6;  // Gauss nodes per radial cell
  int angular = 0;         // k=2/3 azimuthal node count (0: default)
  int polar = 0;           // k=3 polar Gauss node count (0: default)

  static GridResolution defaults_for(int k);
  GridResolution scaled(double factor) const;  // refine/coarsen radial+angular
};

// Discretization of a population as a weighted measure. Every atom carries
// its radial ray (origin, direction, coordinate t and node interval
// [cell_lo, cell_hi]) so score integrals can treat the cell crossed by an
// ellipsoid boundary fractionally instead of all-or-nothing.
//
// Radial cells are equal-mass with one cell edge pinned at the standardized
// gamma-quantile radius, and the cell inside that edge uses a right-Radau
// rule, so the minimizing ellipsoid boundary of the aligned level coincides
// with an atom and the cumulative mass inside it equals gamma exactly.
struct QuadratureGrid {
  WeightedMeasure measure;
  Matrix origins;  // n x k
  Matrix rays;     // n x k, x(t) = origin + t * ray
  Vector t;        // radial coordinate per atom
  Vector cell_lo;
  Vector cell_hi;
  double radial_gap = 0.0;       // max spacing between consecutive radial nodes
  double coverage_radius = 0.0;  // standardized truncation radius
  double aligned_gamma = 0.5;
  int dim = 0;

  int n() const { return measure.n(); }
};

// Quadrature discretization (k <= 3). The grid is mass-aligned at `gamma`.
QuadratureGrid discretize(const PopulationSpec& spec, const GridResolution& res = {},
                          double gamma = 0.5);

// Mixture (1-eps) * spec + eps * (q shifted by r).
PopulationSpec contaminate(const PopulationSpec& spec, const PopulationSpec& q, double eps,
                           const Vector& shift);

}  // namespace mcd
