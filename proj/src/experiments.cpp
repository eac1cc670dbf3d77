#include "mcd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcd/estimator.hpp"
#include "mcd/functional.hpp"
#include "mcd/threading.hpp"

namespace mcd {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * (static_cast<double>(v.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// Lilliefors normality distance: KS statistic after standardizing by the
// sample mean and sd. Asymptotic 1% critical value 1.035/sqrt(n).
struct NormalityScreen {
  double statistic;
  double critical;
  bool pass;
};

NormalityScreen lilliefors(std::vector<double> v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= (n - 1.0);
  const double sd = std::sqrt(var);
  std::sort(v.begin(), v.end());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf((v[i] - mean) / sd);
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  const double crit = 1.035 / std::sqrt(n);
  return NormalityScreen{d, crit, d < crit};
}

Theta theta_from_fit(const McdFit& fit) {
  return Theta{fit.T, pds_sqrt(PdsMatrix(fit.C)), fit.radius};
}

// One estimator replica; certificate failures abort the experiment rather
// than silently contaminating the statistics.
Vector replica_theta_hat(const PopulationSpec& pop, int n, double gamma, int starts,
                         std::uint64_t seed, std::uint64_t stream) {
  const Dataset d = sample(pop, n, seed, stream);
  CstepOptions opts;
  opts.starts = starts;
  opts.seed = seed ^ (0x9e3779b97f4a7c15ULL + stream);
  opts.threads = 1;
  const McdFit fit = cstep_mcd(d, gamma, opts);
  if (fit.degenerate || !fit.certificate.mass_ok || !fit.certificate.subsample_size_ok)
    throw CertificateError("replica fit failed its certificate (n=" + std::to_string(n) +
                           ", stream=" + std::to_string(stream) + ")");
  return theta_from_fit(fit).vectorize();
}

// Distance used for functional comparisons: worst componentwise deviation
// across (T, C, r, det-relative).
double fit_distance(const McdFit& a, const McdFit& b) {
  double d = (a.T - b.T).cwiseAbs().maxCoeff();
  d = std::max(d, (a.C - b.C).cwiseAbs().maxCoeff());
  d = std::max(d, std::abs(a.radius - b.radius));
  d = std::max(d, std::abs(a.det - b.det) / std::max(std::abs(b.det), 1e-300));
  return d;
}

McdFit certified_functional(const WeightedMeasure& p, double gamma, int starts,
                            std::uint64_t seed, int threads) {
  FunctionalOptions fo;
  fo.starts = starts;
  fo.seed = seed;
  fo.threads = threads;
  McdFit fit = functional_mcd(p, gamma, fo);
  if (!fit.certificate.passed())
    throw CertificateError("functional fit failed its certificate (gamma=" + std::to_string(gamma) +
                           ")");
  return fit;
}

}  // namespace

Json ExperimentConfig::to_json() const {
  return Json{{"population", mcd::to_json(population)},
              {"gamma", gamma},
              {"n_grid", n_grid},
              {"replicas", replicas},
              {"seed", seed},
              {"starts", starts},
              {"threads", threads},
              {"tolerance", tolerance}};
}

ExperimentReport run_consistency(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  const QuadratureGrid grid = discretize(cfg.population, cfg.resolution, cfg.gamma);
  const Vector theta0 = solve_theta0(grid, cfg.gamma).vectorize();
  const int threads = resolve_threads(cfg.threads);

  std::ostringstream csv;
  csv << "n,replica,error\n";
  Json per_n = Json::array();
  std::vector<double> medians;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const int n = cfg.n_grid[ni];
    std::vector<double> errs(static_cast<std::size_t>(cfg.replicas));
    parallel_for(cfg.replicas, threads, [&](int r) {
      const std::uint64_t stream = ni * 1000003ULL + static_cast<std::uint64_t>(r);
      const Vector th = replica_theta_hat(cfg.population, n, cfg.gamma, cfg.starts, cfg.seed, stream);
      errs[static_cast<std::size_t>(r)] = (th - theta0).norm();
    });
    for (int r = 0; r < cfg.replicas; ++r)
      csv << n << "," << r << "," << errs[static_cast<std::size_t>(r)] << "\n";
    std::vector<double> sorted = errs;
    std::sort(sorted.begin(), sorted.end());
    const double med = median(errs);
    medians.push_back(med);
    per_n.push_back(Json{{"n", n},
                         {"median_error", med},
                         {"q25", quantile_sorted(sorted, 0.25)},
                         {"q75", quantile_sorted(sorted, 0.75)}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (medians[i] >= medians[i - 1]) decreasing = false;
  rep.pass = decreasing && medians.back() < cfg.tolerance;
  rep.details = Json{{"experiment", "consistency"},
                     {"config", cfg.to_json()},
                     {"theta0", vector_to_json(theta0)},
                     {"per_n", per_n},
                     {"decreasing", decreasing},
                     {"final_median", medians.back()},
                     {"pass", rep.pass}};
  rep.csv = csv.str();
  return rep;
}

ExperimentReport run_clt(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  const QuadratureGrid grid = discretize(cfg.population, cfg.resolution, cfg.gamma);
  const CltReport clt = clt_covariance(grid, cfg.gamma);
  const Vector theta0 = clt.theta0.vectorize();
  const int p = static_cast<int>(theta0.size());
  const int k = clt.theta0.k();
  const int n = cfg.n_grid.back();
  const int threads = resolve_threads(cfg.threads);

  std::vector<Vector> z(static_cast<std::size_t>(cfg.replicas));
  parallel_for(cfg.replicas, threads, [&](int r) {
    const Vector th = replica_theta_hat(cfg.population, n, cfg.gamma, cfg.starts, cfg.seed,
                                        static_cast<std::uint64_t>(r));
    z[static_cast<std::size_t>(r)] = std::sqrt(static_cast<double>(n)) * (th - theta0);
  });

  Vector mean = Vector::Zero(p);
  for (const auto& v : z) mean += v;
  mean /= cfg.replicas;
  Matrix cov = Matrix::Zero(p, p);
  for (const auto& v : z) cov.noalias() += (v - mean) * (v - mean).transpose();
  cov /= (cfg.replicas - 1.0);

  Vector rel_err(p);
  for (int j = 0; j < p; ++j)
    rel_err(j) = std::abs(cov(j, j) - clt.asy_cov(j, j)) / std::abs(clt.asy_cov(j, j));
  const double max_rel = rel_err.maxCoeff();

  Json normality = Json::array();
  bool normal_ok = true;
  for (int j = 0; j < k; ++j) {
    std::vector<double> marg(static_cast<std::size_t>(cfg.replicas));
    for (int r = 0; r < cfg.replicas; ++r) marg[static_cast<std::size_t>(r)] = z[static_cast<std::size_t>(r)](j);
    const NormalityScreen s = lilliefors(std::move(marg));
    normal_ok = normal_ok && s.pass;
    normality.push_back(Json{{"coordinate", j}, {"statistic", s.statistic},
                             {"critical_1pct", s.critical}, {"pass", s.pass}});
  }

  bool mean_ok = true;
  for (int j = 0; j < p; ++j) {
    const double se = std::sqrt(cov(j, j) / cfg.replicas);
    if (std::abs(mean(j)) > 3.0 * se) mean_ok = false;
  }

  std::ostringstream csv;
  csv << "replica";
  for (int j = 0; j < p; ++j) csv << ",z" << j;
  csv << "\n";
  for (int r = 0; r < cfg.replicas; ++r) {
    csv << r;
    for (int j = 0; j < p; ++j) csv << "," << z[static_cast<std::size_t>(r)](j);
    csv << "\n";
  }

  rep.pass = max_rel <= 0.15 && normal_ok;
  rep.details = Json{{"experiment", "clt"},
                     {"config", cfg.to_json()},
                     {"n", n},
                     {"theta0", vector_to_json(theta0)},
                     {"asy_cov_diag", vector_to_json(clt.asy_cov.diagonal())},
                     {"mc_cov_diag", vector_to_json(cov.diagonal())},
                     {"diag_rel_err", vector_to_json(rel_err)},
                     {"max_diag_rel_err", max_rel},
                     {"normality", normality},
                     {"mean_within_3se", mean_ok},
                     {"mc_mean", vector_to_json(mean)},
                     {"cond_jacobian", clt.cond_jac},
                     {"pass", rep.pass}};
  rep.csv = csv.str();
  return rep;
}

ExperimentReport run_influence(const ExperimentConfig& cfg, const std::vector<Vector>& xs,
                               const std::vector<double>& eps_list) {
  ExperimentReport rep;
  if (eps_list.size() < 2) throw Error("run_influence: need at least two eps values");
  const QuadratureGrid grid = discretize(cfg.population, cfg.resolution, cfg.gamma);
  const CltReport clt = clt_covariance(grid, cfg.gamma);
  const int threads = resolve_threads(cfg.threads);

  // baseline through the same functional route as the perturbed fits
  const McdFit base = certified_functional(grid.measure, cfg.gamma, cfg.starts, cfg.seed, threads);
  const Vector theta_base = theta_from_fit(base).vectorize();

  std::vector<double> eps = eps_list;
  std::sort(eps.begin(), eps.end(), std::greater<double>());

  std::ostringstream csv;
  csv << "x0,eps,coordinate,quotient,formula\n";
  Json per_x = Json::array();
  bool all_ok = true;
  for (const Vector& x : xs) {
    const Vector formula = influence(x, clt);
    std::vector<Vector> quotients;
    for (double e : eps) {
      const WeightedMeasure pert = grid.measure.perturbed(x, e);
      const McdFit fit = certified_functional(pert, cfg.gamma, cfg.starts, cfg.seed, threads);
      quotients.push_back((theta_from_fit(fit).vectorize() - theta_base) / e);
      for (Eigen::Index j = 0; j < quotients.back().size(); ++j)
        csv << x(0) << "," << e << "," << j << "," << quotients.back()(j) << "," << formula(j)
            << "\n";
    }
    // first-order Richardson extrapolation on the two smallest eps
    const double e1 = eps[eps.size() - 2], e2 = eps[eps.size() - 1];
    const Vector q1 = quotients[quotients.size() - 2], q2 = quotients.back();
    const Vector extrap = q2 + (q2 - q1) * (e2 / (e1 - e2));

    bool ok = true;
    Vector comp_err(extrap.size());
    for (Eigen::Index j = 0; j < extrap.size(); ++j) {
      const double diff = std::abs(extrap(j) - formula(j));
      comp_err(j) = diff;
      if (diff > 0.05 * std::abs(formula(j)) && diff > 1e-3) ok = false;
    }
    all_ok = all_ok && ok;
    per_x.push_back(Json{{"x", vector_to_json(x)},
                         {"formula", vector_to_json(formula)},
                         {"extrapolated_quotient", vector_to_json(extrap)},
                         {"abs_error", vector_to_json(comp_err)},
                         {"pass", ok}});
  }
  rep.pass = all_ok;
  rep.details = Json{{"experiment", "influence"},
                     {"config", cfg.to_json()},
                     {"eps_list", eps},
                     {"theta0", to_json(clt.theta0)},
                     {"per_x", per_x},
                     {"pass", rep.pass}};
  rep.csv = csv.str();
  return rep;
}

ExperimentReport run_von_mises(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  const QuadratureGrid grid = discretize(cfg.population, cfg.resolution, cfg.gamma);
  const CltReport clt = clt_covariance(grid, cfg.gamma);
  const Vector theta0 = clt.theta0.vectorize();
  const Matrix neg_jinv = -clt.jac.fullPivLu().inverse();
  const int threads = resolve_threads(cfg.threads);

  std::ostringstream csv;
  csv << "n,replica,sqrt_n_residual\n";
  Json per_n = Json::array();
  std::vector<double> medians;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const int n = cfg.n_grid[ni];
    std::vector<double> resid(static_cast<std::size_t>(cfg.replicas));
    parallel_for(cfg.replicas, threads, [&](int r) {
      const std::uint64_t stream = ni * 1000003ULL + static_cast<std::uint64_t>(r);
      const Dataset d = sample(cfg.population, n, cfg.seed, stream);
      CstepOptions opts;
      opts.starts = cfg.starts;
      opts.seed = cfg.seed ^ (0x9e3779b97f4a7c15ULL + stream);
      opts.threads = 1;
      const McdFit fit = cstep_mcd(d, cfg.gamma, opts);
      if (fit.degenerate) throw CertificateError("von Mises replica degenerate");
      const Vector th = theta_from_fit(fit).vectorize();
      Vector if_sum = Vector::Zero(theta0.size());
      for (int i = 0; i < n; ++i)
        if_sum += neg_jinv * psi_vec(d.points.row(i).transpose(), clt.theta0, cfg.gamma);
      if_sum /= static_cast<double>(n);
      resid[static_cast<std::size_t>(r)] =
          std::sqrt(static_cast<double>(n)) * (th - theta0 - if_sum).norm();
    });
    for (int r = 0; r < cfg.replicas; ++r)
      csv << n << "," << r << "," << resid[static_cast<std::size_t>(r)] << "\n";
    const double med = median(resid);
    medians.push_back(med);
    per_n.push_back(Json{{"n", n}, {"median_sqrt_n_residual", med}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (medians[i] >= medians[i - 1]) decreasing = false;
  rep.pass = decreasing;
  rep.details = Json{{"experiment", "von_mises"},
                     {"config", cfg.to_json()},
                     {"per_n", per_n},
                     {"pass", rep.pass}};
  rep.csv = csv.str();
  return rep;
}

ExperimentReport run_contamination(const ExperimentConfig& cfg, double eps,
                                   const std::vector<double>& shift_grid,
                                   const std::vector<double>& eps_grid, double eps_grid_shift) {
  ExperimentReport rep;
  if (!(eps < cfg.gamma && cfg.gamma < 1.0 - eps))
    throw Error("run_contamination: need eps < gamma < 1 - eps");
  const int k = cfg.population.dim;
  const int threads = resolve_threads(cfg.threads);
  const PopulationSpec q = PopulationSpec::point_mass(Vector::Zero(k));

  const QuadratureGrid clean = discretize(cfg.population, cfg.resolution, cfg.gamma);
  const McdFit fit_gamma = certified_functional(clean.measure, cfg.gamma, cfg.starts, cfg.seed, threads);
  const double gamma_star = cfg.gamma / (1.0 - eps);
  const McdFit fit_star = certified_functional(clean.measure, gamma_star, cfg.starts, cfg.seed, threads);

  const auto contaminated_fit = [&](double e, double shift) {
    Vector r = Vector::Zero(k);
    r(0) = shift;
    const PopulationSpec mixed = contaminate(cfg.population, q, e, r);
    const QuadratureGrid grid = discretize(mixed, cfg.resolution, cfg.gamma);
    return certified_functional(grid.measure, cfg.gamma, cfg.starts, cfg.seed, threads);
  };

  std::ostringstream csv;
  csv << "kind,value,dist_to_gamma_fit,dist_to_gamma_star_fit\n";
  Json shifts = Json::array();
  std::vector<double> dist_star;
  std::vector<McdFit> shift_fits;
  for (double s : shift_grid) {
    const McdFit fit = contaminated_fit(eps, s);
    const double da = fit_distance(fit, fit_gamma);
    const double db = fit_distance(fit, fit_star);
    dist_star.push_back(db);
    shift_fits.push_back(fit);
    shifts.push_back(Json{{"shift", s}, {"dist_to_gamma", da}, {"dist_to_gamma_star", db}});
    csv << "shift," << s << "," << da << "," << db << "\n";
  }
  // empirical r0: first shift from which the fit stays at the gamma* fit
  int r0_index = -1;
  for (std::size_t i = 0; i < dist_star.size(); ++i) {
    bool tail_ok = true;
    for (std::size_t j = i; j < dist_star.size(); ++j) tail_ok = tail_ok && dist_star[j] <= 1e-6;
    if (tail_ok) {
      r0_index = static_cast<int>(i);
      break;
    }
  }
  // beyond r0 the fit must be constant in r
  bool constant_tail = true;
  if (r0_index >= 0)
    for (std::size_t i = static_cast<std::size_t>(r0_index) + 1; i < shift_fits.size(); ++i)
      constant_tail = constant_tail &&
                      fit_distance(shift_fits[i], shift_fits[static_cast<std::size_t>(r0_index)]) <= 1e-9;

  Json epses = Json::array();
  std::vector<double> dist_gamma_eps;
  for (double e : eps_grid) {
    const McdFit fit = e == 0.0
                           ? certified_functional(clean.measure, cfg.gamma, cfg.starts, cfg.seed, threads)
                           : contaminated_fit(e, eps_grid_shift);
    const double da = fit_distance(fit, fit_gamma);
    dist_gamma_eps.push_back(da);
    epses.push_back(Json{{"eps", e}, {"dist_to_gamma", da}});
    csv << "eps," << e << "," << da << "," << fit_distance(fit, fit_star) << "\n";
  }
  bool eps_final_two_decreasing = true;
  const std::size_t ne = dist_gamma_eps.size();
  if (ne >= 3) {
    eps_final_two_decreasing = dist_gamma_eps[ne - 1] < dist_gamma_eps[ne - 2] &&
                               dist_gamma_eps[ne - 2] < dist_gamma_eps[ne - 3];
  } else if (ne == 2) {
    eps_final_two_decreasing = dist_gamma_eps[1] < dist_gamma_eps[0];
  }

  const bool far_exact = !dist_star.empty() && dist_star.back() <= 1e-6;
  rep.pass = far_exact && eps_final_two_decreasing && (r0_index < 0 || constant_tail);
  rep.details = Json{{"experiment", "contamination"},
                     {"config", cfg.to_json()},
                     {"eps", eps},
                     {"gamma_star", gamma_star},
                     {"shifts", shifts},
                     {"eps_grid", epses},
                     {"eps_grid_shift", eps_grid_shift},
                     {"r0_shift_index", r0_index},
                     {"constant_beyond_r0", constant_tail},
                     {"far_shift_exact", far_exact},
                     {"eps_final_two_decreasing", eps_final_two_decreasing},
                     {"pass", rep.pass}};
  rep.csv = csv.str();
  return rep;
}

}  // namespace mcd
