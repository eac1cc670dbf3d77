#pragma once

// Closed-form oracle values for the standard Gaussian population, derived
// independently of the library (plain erf/exp arithmetic). Used to freeze
// expected values for the population functional, the score Jacobian and the
// influence function in one dimension, and the chi-square truncation values
// in two dimensions.

#include <cmath>

namespace oracle {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Inverse standard normal CDF by bisection + Newton.
inline double normal_quantile(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) x -= (normal_cdf(x) - p) / normal_pdf(x);
  return x;
}

// Euclidean cutoff c with P(|Y| <= c) = gamma for standard normal Y.
inline double cutoff_1d(double gamma) { return normal_quantile(0.5 * (1.0 + gamma)); }

// MCD scatter of the standard normal in one dimension:
// Sigma0 = E[Y^2 1{|Y|<=c}] / gamma = (gamma - 2 c phi(c)) / gamma.
inline double sigma0_1d(double gamma) {
  const double c = cutoff_1d(gamma);
  return (gamma - 2.0 * c * normal_pdf(c)) / gamma;
}

// Fourth truncated moment E[Y^4 1{|Y|<=c}] = 3 gamma - 2 phi(c) c (c^2 + 3).
inline double fourth_moment_1d(double gamma) {
  const double c = cutoff_1d(gamma);
  return 3.0 * gamma - 2.0 * normal_pdf(c) * c * (c * c + 3.0);
}

// k = 2: squared Euclidean cutoff solves P(chi^2_2 <= q) = gamma.
inline double cutoff_sq_2d(double gamma) { return -2.0 * std::log(1.0 - gamma); }

// k = 2: Sigma0 = P(chi^2_4 <= q)/gamma * I with the closed-form chi^2_4 cdf.
inline double sigma0_2d(double gamma) {
  const double q = cutoff_sq_2d(gamma);
  return (1.0 - std::exp(-0.5 * q) * (1.0 + 0.5 * q)) / gamma;
}

// Entries of Lambda'(theta0) for the standard normal, k = 1, in the
// (m, g, r) coordinates: obtained by differentiating the three truncated
// integrals by hand.
struct Jacobian1d {
  double dL1_dm, dL1_dg, dL1_dr;
  double dL2_dm, dL2_dg, dL2_dr;
  double dL3_dm, dL3_dg, dL3_dr;
};

inline Jacobian1d jacobian_1d(double gamma) {
  const double c = cutoff_1d(gamma);
  const double f = normal_pdf(c);
  const double g = std::sqrt(sigma0_1d(gamma));
  const double r = c / g;
  Jacobian1d j{};
  j.dL1_dm = (2.0 * c * f - gamma) / g;
  j.dL1_dg = 0.0;
  j.dL1_dr = 0.0;
  j.dL2_dm = 0.0;
  j.dL2_dg = 2.0 * r * (r * r - 1.0) * f - 2.0 * gamma / g;
  j.dL2_dr = 2.0 * g * (r * r - 1.0) * f;
  j.dL3_dm = 0.0;
  j.dL3_dg = 2.0 * r * f;
  j.dL3_dr = 2.0 * g * f;
  return j;
}

// Asymptotic variance of the location component (k = 1):
// M11 / (dL1_dm)^2 with M11 = E[psi1^2] = gamma.
inline double location_asy_var_1d(double gamma) {
  const Jacobian1d j = jacobian_1d(gamma);
  return gamma / (j.dL1_dm * j.dL1_dm);
}

// Influence function components for k = 1 in (m, g, r) coordinates.
struct Influence1d {
  double m, g, r;
};

inline Influence1d influence_1d(double gamma, double x) {
  const Jacobian1d j = jacobian_1d(gamma);
  const double g = std::sqrt(sigma0_1d(gamma));
  const double c = cutoff_1d(gamma);
  const double r = c / g;
  const double u = x / g;
  double p1, p2, p3;
  if (std::abs(u) <= r) {
    p1 = u;
    p2 = u * u - 1.0;
    p3 = 1.0 - gamma;
  } else {
    p1 = 0.0;
    p2 = 0.0;
    p3 = -gamma;
  }
  Influence1d out{};
  out.m = -p1 / j.dL1_dm;
  // solve the (g, r) block
  const double det = j.dL2_dg * j.dL3_dr - j.dL2_dr * j.dL3_dg;
  out.g = (-p2 * j.dL3_dr + p3 * j.dL2_dr) / det;
  out.r = (-p3 * j.dL2_dg + p2 * j.dL3_dg) / det;
  return out;
}

}  // namespace oracle
