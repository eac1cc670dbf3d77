#include "mcd/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "mcd/functional.hpp"

namespace mcd {

namespace {

constexpr double kBoundaryBand = 1e-9;

Vector score_vector(const Vector& u, double frac, double gamma, int k) {
  // frac-weighted inside part plus the unconditional -gamma in the mass row
  const int p = theta_dim(k);
  Vector v(p);
  v.head(k) = frac * u;
  int idx = k;
  for (int j = 0; j < k; ++j)
    for (int i = j; i < k; ++i)
      v(idx++) = frac * (u(i) * u(j) - (i == j ? 1.0 : 0.0));
  v(p - 1) = frac - gamma;
  return v;
}

}  // namespace

Vector ScoreValue::vectorized() const {
  const int k = static_cast<int>(psi1.size());
  Vector v(theta_dim(k));
  v.head(k) = psi1;
  v.segment(k, k * (k + 1) / 2) = vech(psi2);
  v(v.size() - 1) = psi3;
  return v;
}

ScoreValue psi(const Vector& y, const Theta& theta, double gamma) {
  const int k = theta.k();
  if (y.size() != k) throw Error("psi: dimension mismatch");
  const Vector u = theta.G.solve(y - theta.m);
  const bool inside = u.norm() <= theta.r;
  ScoreValue s;
  if (inside) {
    s.psi1 = u;
    s.psi2 = u * u.transpose() - Matrix::Identity(k, k);
    s.psi3 = 1.0 - gamma;
  } else {
    s.psi1 = Vector::Zero(k);
    s.psi2 = Matrix::Zero(k, k);
    s.psi3 = -gamma;
  }
  return s;
}

Vector psi_vec(const Vector& y, const Theta& theta, double gamma) {
  return psi(y, theta, gamma).vectorized();
}

Vector lambda(const Theta& theta, const QuadratureGrid& grid, double gamma) {
  const int k = theta.k();
  if (grid.dim != k) throw Error("lambda: grid dimension mismatch");
  const int p = theta_dim(k);
  const Matrix ginv = theta.G.inverse();
  const double r2 = theta.r * theta.r;

  Vector acc = Vector::Zero(p);
  const int n = grid.n();
  for (int i = 0; i < n; ++i) {
    const double w = grid.measure.weights(i);
    const Vector u = ginv * (grid.measure.points.row(i).transpose() - theta.m);
    const double lo = grid.cell_lo(i), hi = grid.cell_hi(i);
    double frac;
    if (hi - lo <= 0.0) {
      frac = u.squaredNorm() <= r2 ? 1.0 : 0.0;
    } else {
      // coverage of the node interval [lo,hi] along its ray inside E
      const Vector pdir = ginv * grid.rays.row(i).transpose();
      const Vector q = ginv * (grid.origins.row(i).transpose() - theta.m);
      const double a = pdir.squaredNorm();
      if (a <= 0.0) {
        frac = u.squaredNorm() <= r2 ? 1.0 : 0.0;
      } else {
        const double b = 2.0 * pdir.dot(q);
        const double c = q.squaredNorm() - r2;
        const double disc = b * b - 4.0 * a * c;
        if (disc <= 0.0) {
          frac = 0.0;
        } else {
          const double sq = std::sqrt(disc);
          const double tlo = (-b - sq) / (2.0 * a);
          const double thi = (-b + sq) / (2.0 * a);
          const double inter = std::min(hi, thi) - std::max(lo, tlo);
          frac = std::clamp(inter / (hi - lo), 0.0, 1.0);
        }
      }
    }
    if (frac > 0.0) {
      acc.head(k) += (w * frac) * u;
      int idx = k;
      for (int j = 0; j < k; ++j)
        for (int ii = j; ii < k; ++ii)
          acc(idx++) += w * frac * (u(ii) * u(j) - (ii == j ? 1.0 : 0.0));
      acc(p - 1) += w * frac;
    }
  }
  acc(p - 1) -= gamma * grid.measure.weights.sum();
  return acc;
}

Matrix lambda_jacobian(const Theta& theta, const QuadratureGrid& grid, double gamma,
                       double fd_scale, JacobianDiagnostics* diag) {
  const int p = theta.p();
  const Vector v0 = theta.vectorize();
  const Vector base = lambda(theta, grid, gamma);
  Matrix jac(p, p);
  Vector steps(p), mismatch(p);
  for (int j = 0; j < p; ++j) {
    const double h = fd_scale * std::max(1.0, std::abs(v0(j)));
    steps(j) = h;
    Vector vp = v0, vm = v0;
    vp(j) += h;
    vm(j) -= h;
    const Vector lp = lambda(Theta::devectorize(vp, theta.k()), grid, gamma);
    const Vector lm = lambda(Theta::devectorize(vm, theta.k()), grid, gamma);
    jac.col(j) = (lp - lm) / (2.0 * h);
    // one-sided estimates disagree when the ellipsoid boundary sits within
    // h of a grid node interval edge
    const Vector fwd = (lp - base) / h;
    const Vector bwd = (base - lm) / h;
    const double scale = std::max(jac.col(j).cwiseAbs().maxCoeff(), 1e-12);
    mismatch(j) = (fwd - bwd).cwiseAbs().maxCoeff() / scale;
  }
  if (diag) {
    diag->fd_steps = steps;
    diag->onesided_mismatch = mismatch;
    diag->boundary_instability = (mismatch.array() > 1e-3).any();
  }
  return jac;
}

namespace {

Theta project_theta(Vector v, int k) {
  // re-symmetrize (vech keeps symmetry) and clamp G's spectrum and r
  const int ng = k * (k + 1) / 2;
  Matrix g = unvech(v.segment(k, ng), k);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  Vector ev = eig.eigenvalues().cwiseMax(1e-10);
  g = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
  v.segment(k, ng) = vech(g);
  v(v.size() - 1) = std::max(v(v.size() - 1), 1e-10);
  return Theta::devectorize(v, k);
}

}  // namespace

Theta solve_theta0(const QuadratureGrid& grid, double gamma, std::optional<Theta> init,
                   const SolveOptions& opts) {
  Theta theta = [&]() {
    if (init) return *init;
    FunctionalOptions fo;
    fo.starts = opts.init_starts;
    fo.seed = 0;
    const McdFit fit = functional_mcd(grid.measure, gamma, fo);
    if (fit.degenerate) throw DegenerateError("solve_theta0: degenerate functional initializer");
    return Theta{fit.T, pds_sqrt(PdsMatrix(fit.C)), fit.radius};
  }();

  Vector lam = lambda(theta, grid, gamma);
  double best = lam.cwiseAbs().maxCoeff();
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (best < opts.tol) return theta;
    const Matrix jac = lambda_jacobian(theta, grid, gamma, opts.fd_scale);
    Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 0.0) || smax / smin > opts.max_condition)
      throw Error("solve_theta0: Lambda' is numerically singular (condition " +
                  std::to_string(smax / std::max(smin, 1e-300)) +
                  "); the non-singular-derivative hypothesis fails on this grid");
    const Vector delta = svd.solve(-lam);
    // halve the step until the residual decreases
    double step = 1.0;
    bool improved = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      Theta cand = project_theta(theta.vectorize() + step * delta, theta.k());
      Vector cand_lam = lambda(cand, grid, gamma);
      const double cand_norm = cand_lam.cwiseAbs().maxCoeff();
      if (cand_norm < best) {
        theta = cand;
        lam = cand_lam;
        best = cand_norm;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  if (best < opts.tol) return theta;
  throw Error("solve_theta0: no convergence (residual " + std::to_string(best) + ")");
}

CltReport clt_covariance(const QuadratureGrid& grid, double gamma, const SolveOptions& opts) {
  CltReport rep;
  rep.gamma = gamma;
  rep.theta0 = solve_theta0(grid, gamma, std::nullopt, opts);
  rep.lambda_residual = lambda(rep.theta0, grid, gamma).cwiseAbs().maxCoeff();
  rep.jac = lambda_jacobian(rep.theta0, grid, gamma, opts.fd_scale, &rep.diagnostics);

  const int k = rep.theta0.k();
  const int p = theta_dim(k);
  const Matrix ginv = rep.theta0.G.inverse();
  const double r2 = rep.theta0.r * rep.theta0.r;
  Matrix second = Matrix::Zero(p, p);
  Vector first = Vector::Zero(p);
  for (int i = 0; i < grid.n(); ++i) {
    const double w = grid.measure.weights(i);
    const Vector u = ginv * (grid.measure.points.row(i).transpose() - rep.theta0.m);
    const double frac = u.squaredNorm() <= r2 ? 1.0 : 0.0;
    const Vector s = score_vector(u, frac, gamma, k);
    first += w * s;
    second.noalias() += w * s * s.transpose();
  }
  rep.M = second - first * first.transpose();
  rep.M = 0.5 * (rep.M + rep.M.transpose());

  Eigen::JacobiSVD<Matrix> svd(rep.jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  rep.cond_jac = svd.singularValues()(0) / std::max(smin, 1e-300);
  const Matrix jinv = rep.jac.fullPivLu().inverse();
  rep.asy_cov = jinv * rep.M * jinv.transpose();
  rep.asy_cov = 0.5 * (rep.asy_cov + rep.asy_cov.transpose());
  return rep;
}

Vector influence(const Vector& x, const CltReport& report) {
  const Theta& th = report.theta0;
  const double d2 = mahalanobis_sq(x, th.m, PdsMatrix(th.G.mat() * th.G.mat()));
  const double rho2 = th.r * th.r;
  if (std::abs(d2 - rho2) <= kBoundaryBand)
    throw Error("influence: x lies on the minimizing ellipsoid boundary, where the influence "
                "function is not defined");
  return -report.jac.fullPivLu().solve(psi_vec(x, th, report.gamma));
}

Vector influence(const Vector& x, const QuadratureGrid& grid, double gamma) {
  return influence(x, clt_covariance(grid, gamma));
}

}  // namespace mcd
