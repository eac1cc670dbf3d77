#pragma once

#include <optional>

#include "mcd/distributions.hpp"
#include "mcd/model.hpp"

namespace mcd {

// Score triple at a point: with u = G^{-1}(y - m) and the indicator
// 1{||u|| <= r},
//   psi1 = 1 * u,  psi2 = 1 * (u u' - I),  psi3 = 1 - gamma.
struct ScoreValue {
  Vector psi1;
  Matrix psi2;
  double psi3;

  Vector vectorized() const;
};

ScoreValue psi(const Vector& y, const Theta& theta, double gamma);
Vector psi_vec(const Vector& y, const Theta& theta, double gamma);

// Population score map Lambda(theta) = integral of Psi(y, theta) dP0 over
// the quadrature grid. The radial node interval crossed by the ellipsoid
// boundary contributes fractionally (coverage of the interval along its
// ray), which keeps Lambda smooth in theta at the grid's resolution; all
// fully inside/outside nodes contribute their exact hard-indicator value.
Vector lambda(const Theta& theta, const QuadratureGrid& grid, double gamma);

struct JacobianDiagnostics {
  Vector fd_steps;           // per-coordinate step actually used
  Vector onesided_mismatch;  // relative forward/backward disagreement
  bool boundary_instability = false;  // any coordinate above 1e-3
};

// Central finite differences of lambda, step h_j = fd_scale * max(1, |theta_j|).
Matrix lambda_jacobian(const Theta& theta, const QuadratureGrid& grid, double gamma,
                       double fd_scale = 1e-5, JacobianDiagnostics* diag = nullptr);

struct SolveOptions {
  double tol = 1e-10;        // on ||Lambda||_inf
  int max_iterations = 100;
  double fd_scale = 1e-5;
  double max_condition = 1e12;
  int init_starts = 4;       // multistart budget for the default initializer
};

// Root of Lambda by damped Newton iteration; G is re-symmetrized and
// PDS-projected (eigenvalues clamped at 1e-10) after every step. The default
// initializer is the MCD functional of the grid measure.
Theta solve_theta0(const QuadratureGrid& grid, double gamma,
                   std::optional<Theta> init = std::nullopt, const SolveOptions& opts = {});

struct CltReport {
  Theta theta0;
  Matrix jac;      // Lambda'(theta0), p x p
  Matrix M;        // covariance of Psi(X, theta0)
  Matrix asy_cov;  // jac^{-1} M jac^{-T}
  double cond_jac = 0.0;
  double lambda_residual = 0.0;
  JacobianDiagnostics diagnostics;
  double gamma = 0.5;
};

CltReport clt_covariance(const QuadratureGrid& grid, double gamma, const SolveOptions& opts = {});

// Influence function -Lambda'(theta0)^{-1} Psi(x, theta0); x must stay off
// the minimizing ellipsoid boundary band.
Vector influence(const Vector& x, const QuadratureGrid& grid, double gamma);
Vector influence(const Vector& x, const CltReport& report);

}  // namespace mcd
