#include "mcd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mcd/rng.hpp"
#include "mcd/threading.hpp"
#include "solver_util.hpp"

namespace mcd {

namespace {

using detail::Shape;

constexpr double kDetTieRel = 1e-12;
constexpr double kBoundaryTol = 1e-9;
constexpr double kMonotoneSlack = 1e-14;

std::vector<double> all_d2(const Dataset& d, const Vector& t, const Shape& solver) {
  std::vector<double> out(static_cast<std::size_t>(d.n()));
  for (int i = 0; i < d.n(); ++i) out[static_cast<std::size_t>(i)] = solver.d2(d.points.row(i).transpose(), t);
  return out;
}

// Indices of the h smallest distances, ties resolved by index.
std::vector<int> h_smallest(const std::vector<double>& d2, int h) {
  std::vector<int> idx(d2.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (d2[static_cast<std::size_t>(a)] != d2[static_cast<std::size_t>(b)])
      return d2[static_cast<std::size_t>(a)] < d2[static_cast<std::size_t>(b)];
    return a < b;
  });
  idx.resize(static_cast<std::size_t>(h));
  std::sort(idx.begin(), idx.end());
  return idx;
}

McdFit finalize_fit(const Dataset& d, std::string method, double gamma, std::uint64_t seed,
                    std::vector<int> subsample, const SubsampleMoments& mom, int iterations) {
  McdFit fit;
  fit.method = std::move(method);
  fit.gamma = gamma;
  fit.seed = seed;
  fit.T = mom.T;
  fit.C = mom.C;
  fit.subsample = std::move(subsample);
  fit.iterations = iterations;
  const Shape solver(mom.C);
  fit.degenerate = solver.degenerate;
  fit.det = fit.degenerate ? psd_det(mom.C) : solver.det();
  if (!fit.degenerate) {
    fit.radius = radius(WeightedMeasure::uniform(d), fit.T, PdsMatrix(fit.C), gamma);
    fit.certificate = certify_estimator(d, fit, gamma);
  } else {
    fit.radius = 0.0;
    fit.certificate.degenerate = true;
    fit.certificate.separating_ellipsoid_ok = false;
  }
  return fit;
}

}  // namespace

int subsample_size(int n, double gamma) {
  if (gamma <= 0.0 || gamma > 1.0) throw Error("gamma must lie in (0,1]");
  const double t = static_cast<double>(n) * gamma;
  int h = static_cast<int>(std::ceil(t));
  if (h >= 1 && static_cast<double>(h - 1) >= t - 1e-9) h -= 1;  // t was an integer up to fp noise
  return std::min(h, n);
}

SubsampleMoments subsample_moments(const Dataset& d, const std::vector<int>& s) {
  if (s.empty()) throw Error("subsample_moments: empty subsample");
  for (int i : s)
    if (i < 0 || i >= d.n()) throw Error("subsample_moments: index out of range");
  const double h = static_cast<double>(s.size());
  Vector t = Vector::Zero(d.k());
  for (int i : s) t += d.points.row(i).transpose();
  t /= h;
  Matrix c = Matrix::Zero(d.k(), d.k());
  for (int i : s) {
    const Vector diff = d.points.row(i).transpose() - t;
    c.noalias() += diff * diff.transpose();
  }
  c /= h;
  return SubsampleMoments{t, 0.5 * (c + c.transpose())};
}

McdFit exact_mcd(const Dataset& d, double gamma, const ExactOptions& opts) {
  d.validate();
  const int n = d.n();
  const int h = subsample_size(n, gamma);
  if (n > opts.guard)
    throw Error("exact_mcd: n=" + std::to_string(n) + " exceeds the exhaustive guard (" +
                std::to_string(opts.guard) + "); use cstep_mcd");
  if (h < d.k() + 1)
    throw Error("exact_mcd: subsample size " + std::to_string(h) +
                " below k+1; covariance would be singular");

  std::vector<int> comb(static_cast<std::size_t>(h));
  std::iota(comb.begin(), comb.end(), 0);
  bool have_best = false;
  double best_det = 0.0;
  std::vector<int> best_comb;
  SubsampleMoments best_mom;

  for (;;) {
    SubsampleMoments mom = subsample_moments(d, comb);
    const double det = psd_det(mom.C);
    // strict improvement wins; ties keep the earlier (lexicographically
    // smaller) subset because enumeration is lexicographic
    if (!have_best || det < best_det * (1.0 - kDetTieRel) ||
        (det < best_det && best_det < 1e-300)) {
      have_best = true;
      best_det = det;
      best_comb = comb;
      best_mom = mom;
    }
    // advance to the next combination
    int i = h - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - h + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < h; ++j)
      comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  return finalize_fit(d, "exact", gamma, 0, best_comb, best_mom, 0);
}

namespace {

struct ChainResult {
  bool ok = false;
  double det = 0.0;
  std::vector<int> subsample;
  SubsampleMoments mom;
  int iterations = 0;
};

ChainResult run_chain(const Dataset& d, int h, Rng& rng, int max_iterations) {
  const int n = d.n();
  const int k = d.k();
  ChainResult res;
  // draw random (k+1)-subsets until one has a non-singular covariance
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<int> seedset = rng.subset(n, std::min(n, k + 1));
    SubsampleMoments mom = subsample_moments(d, seedset);
    Shape solver(mom.C);
    if (solver.degenerate) continue;
    std::vector<int> current = h_smallest(all_d2(d, mom.T, solver), h);
    double prev_det = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iterations; ++it) {
      mom = subsample_moments(d, current);
      Shape step(mom.C);
      if (step.degenerate) break;  // degenerate chain, try a fresh start
      const double det = step.det();
      if (det > prev_det * (1.0 + kMonotoneSlack))
        throw Error("cstep_mcd: concentration step increased the determinant");
      res.ok = true;
      res.det = det;
      res.subsample = current;
      res.mom = mom;
      res.iterations = it + 1;
      std::vector<int> next = h_smallest(all_d2(d, mom.T, step), h);
      const bool same = next == current;
      const bool stalled = std::isfinite(prev_det) && prev_det - det < kDetTieRel * std::abs(prev_det);
      current = std::move(next);
      prev_det = det;
      if (same || stalled) return res;
    }
    if (res.ok) return res;
  }
  return res;  // all attempts degenerate
}

}  // namespace

McdFit cstep_mcd(const Dataset& d, double gamma, const CstepOptions& opts) {
  d.validate();
  const int n = d.n();
  const int h = subsample_size(n, gamma);
  if (h < d.k() + 1)
    throw Error("cstep_mcd: subsample size " + std::to_string(h) + " below k+1");
  if (opts.starts < 1) throw Error("cstep_mcd: starts must be >= 1");

  std::vector<ChainResult> results(static_cast<std::size_t>(opts.starts));
  parallel_for(opts.starts, resolve_threads(opts.threads), [&](int i) {
    Rng rng(opts.seed, static_cast<std::uint64_t>(i));
    results[static_cast<std::size_t>(i)] = run_chain(d, h, rng, opts.max_iterations);
  });

  // ordered reduction over chains keeps the result thread-count independent
  const ChainResult* best = nullptr;
  for (const auto& r : results)
    if (r.ok && (!best || r.det < best->det)) best = &r;
  if (!best)
    throw DegenerateError("cstep_mcd: all starts degenerate; data may concentrate on a hyperplane");
  return finalize_fit(d, "cstep", gamma, opts.seed, best->subsample, best->mom, best->iterations);
}

std::vector<int> greedy_delete(const Dataset& d, std::vector<int> s, int target_h) {
  if (target_h < d.k() + 1) throw Error("greedy_delete: target below k+1");
  if (static_cast<int>(s.size()) < target_h) throw Error("greedy_delete: subsample already smaller than target");
  double prev_det = std::numeric_limits<double>::infinity();
  while (static_cast<int>(s.size()) > target_h) {
    SubsampleMoments mom = subsample_moments(d, s);
    Shape solver(mom.C);
    if (solver.degenerate) {
      std::ostringstream oss;
      oss << "greedy_delete: singular covariance for subset {";
      for (std::size_t i = 0; i < s.size(); ++i) oss << (i ? "," : "") << s[i];
      oss << "}";
      throw DegenerateError(oss.str());
    }
    const double det = solver.det();
    if (det > prev_det * (1.0 + kMonotoneSlack))
      throw Error("greedy_delete: deletion increased the determinant");
    prev_det = det;
    int worst = 0;
    double worst_d2 = -1.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double dist = solver.d2(d.points.row(s[j]).transpose(), mom.T);
      if (dist > worst_d2) {
        worst_d2 = dist;
        worst = static_cast<int>(j);
      }
    }
    s.erase(s.begin() + worst);
  }
  return s;
}

CertificateReport certify_estimator(const Dataset& d, const McdFit& fit, double gamma) {
  CertificateReport rep;
  const int n = d.n();
  const int h = subsample_size(n, gamma);
  rep.subsample_size_ok = static_cast<int>(fit.subsample.size()) == h;
  rep.mass_ok = static_cast<double>(fit.subsample.size()) / n >= gamma - 1e-12;
  if (fit.degenerate || !is_pds(fit.C)) {
    rep.degenerate = true;
    rep.separating_ellipsoid_ok = false;
    return rep;
  }
  const PdsMatrix shape(fit.C);
  const double r = radius(WeightedMeasure::uniform(d), fit.T, shape, gamma);
  const double r2 = r * r;
  std::vector<bool> in_s(static_cast<std::size_t>(n), false);
  for (int i : fit.subsample) in_s[static_cast<std::size_t>(i)] = true;
  double max_violation = 0.0;
  int boundary = 0;
  for (int i = 0; i < n; ++i) {
    const double d2 = mahalanobis_sq(d.points.row(i).transpose(), fit.T, shape);
    if (std::abs(d2 - r2) <= kBoundaryTol) ++boundary;
    if (in_s[static_cast<std::size_t>(i)]) {
      // subsample points must lie inside the ellipsoid
      max_violation = std::max(max_violation, d2 - (r2 + kBoundaryTol));
    } else {
      // excluded points must not lie strictly inside
      max_violation = std::max(max_violation, (r2 - kBoundaryTol) - d2);
    }
  }
  rep.boundary_atoms = boundary;
  rep.max_violation = std::max(0.0, max_violation);
  rep.separating_ellipsoid_ok = rep.max_violation == 0.0;
  return rep;
}

}  // namespace mcd
