#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcd/asymptotics.hpp"
#include "mcd/distributions.hpp"
#include "mcd/serialize.hpp"

namespace mcd {

struct ExperimentConfig {
  PopulationSpec population;
  double gamma = 0.5;
  std::vector<int> n_grid;
  int replicas = 100;
  std::uint64_t seed = 1;
  int starts = 50;  // concentration starts per fit
  int threads = 0;  // 0: MCD_THREADS env or hardware
  double tolerance = 0.1;
  GridResolution resolution{};

  Json to_json() const;
};

// Monte Carlo experiment outcome: a pass flag, a structured report that
// embeds the resolved config, and a flat CSV table for plotting. Identical
// config+seed reproduce identical bytes.
struct ExperimentReport {
  bool pass = false;
  Json details;
  std::string csv;
};

// Strong consistency: median ||theta_hat_n - theta0|| must decrease along
// the n-grid and end below the configured tolerance.
ExperimentReport run_consistency(const ExperimentConfig& cfg);

// CLT: empirical covariance of sqrt(n)(theta_hat - theta0) against the
// quadrature asymptotic covariance, plus a normality screen on the location
// marginals.
ExperimentReport run_clt(const ExperimentConfig& cfg);

// Influence function: Richardson-extrapolated perturbation quotients of the
// functional against -Lambda'(theta0)^{-1} Psi(x, theta0).
ExperimentReport run_influence(const ExperimentConfig& cfg, const std::vector<Vector>& xs,
                               const std::vector<double>& eps_list);

// von Mises expansion: median sqrt(n)||theta_hat - theta0 - mean IF(X_i)||
// must decrease along the n-grid.
ExperimentReport run_von_mises(const ExperimentConfig& cfg);

// Contamination recovery: far shifts must reproduce the gamma/(1-eps)
// functional of the clean population exactly (within solver tolerance), and
// the eps-grid trajectory at a fixed moderate shift must approach the clean
// gamma functional.
ExperimentReport run_contamination(const ExperimentConfig& cfg, double eps,
                                   const std::vector<double>& shift_grid,
                                   const std::vector<double>& eps_grid,
                                   double eps_grid_shift = 2.0);

}  // namespace mcd
