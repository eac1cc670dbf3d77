#include "mcd/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mcd/rng.hpp"
#include "mcd/threading.hpp"
#include "solver_util.hpp"

namespace mcd {

namespace {

using detail::Shape;

constexpr double kDetTieRel = 1e-12;
constexpr double kBoundaryTol = 1e-9;
constexpr double kMonotoneSlack = 1e-13;
constexpr double kPhiSnap = 1e-12;

// Trimming of the characterized form for the current shape: full weight on
// the atoms of smallest Mahalanobis distance, a fraction on the atom that
// completes the mass to exactly gamma. Ties take the smallest index first.
Vector fill_to_gamma(const WeightedMeasure& p, const std::vector<double>& d2, double gamma) {
  std::vector<int> order(static_cast<std::size_t>(p.n()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (d2[static_cast<std::size_t>(a)] != d2[static_cast<std::size_t>(b)])
      return d2[static_cast<std::size_t>(a)] < d2[static_cast<std::size_t>(b)];
    return a < b;
  });
  Vector phi = Vector::Zero(p.n());
  double cum = 0.0;
  for (int idx : order) {
    const double w = p.weights(idx);
    if (cum + w < gamma - 1e-15) {
      phi(idx) = 1.0;
      cum += w;
    } else {
      double frac = (gamma - cum) / w;
      if (frac > 1.0 - kPhiSnap) frac = 1.0;
      if (frac < kPhiSnap) frac = 0.0;
      phi(idx) = frac;
      break;
    }
  }
  return phi;
}

struct ChainResult {
  bool ok = false;
  double det = 0.0;
  Vector phi;
  TrimmedMoments mom;
  int iterations = 0;
};

// Concentration iteration from an initial (T, C) to a fixed point.
ChainResult iterate_chain(const WeightedMeasure& p, double gamma, Vector t, Matrix c,
                          int max_iterations) {
  ChainResult res;
  Vector prev_phi;
  double prev_det = std::numeric_limits<double>::infinity();
  std::vector<double> d2(static_cast<std::size_t>(p.n()));
  for (int it = 0; it < max_iterations; ++it) {
    Shape shape(c);
    if (shape.degenerate) return res;
    for (int i = 0; i < p.n(); ++i)
      d2[static_cast<std::size_t>(i)] = shape.d2(p.points.row(i).transpose(), t);
    Vector phi = fill_to_gamma(p, d2, gamma);
    TrimmedMoments mom = trimmed_moments(p, TrimmingWeights{phi});
    Shape next(mom.C);
    if (next.degenerate) return res;
    const double det = next.det();
    if (det > prev_det * (1.0 + kMonotoneSlack))
      throw Error("functional_mcd: concentration step increased the determinant");
    res.ok = true;
    res.det = det;
    res.phi = phi;
    res.mom = mom;
    res.iterations = it + 1;
    const bool same = prev_phi.size() == phi.size() && prev_phi == phi;
    const bool stalled =
        std::isfinite(prev_det) && prev_det - det < kDetTieRel * std::abs(prev_det);
    if (same || stalled) return res;
    prev_phi = phi;
    prev_det = det;
    t = mom.T;
    c = mom.C;
  }
  return res;
}

McdFit finalize_functional(const WeightedMeasure& p, std::string method, double gamma,
                           std::uint64_t seed, const Vector& phi, const TrimmedMoments& mom,
                           int iterations) {
  McdFit fit;
  fit.method = std::move(method);
  fit.gamma = gamma;
  fit.seed = seed;
  fit.T = mom.T;
  fit.C = mom.C;
  fit.weights = TrimmingWeights{phi};
  fit.iterations = iterations;
  Shape shape(mom.C);
  fit.degenerate = shape.degenerate;
  fit.det = fit.degenerate ? psd_det(mom.C) : shape.det();
  if (!fit.degenerate) {
    fit.radius = radius(p, fit.T, PdsMatrix(fit.C), gamma);
    fit.certificate = certify_functional(p, fit, gamma);
  } else {
    fit.certificate.degenerate = true;
    fit.certificate.separating_ellipsoid_ok = false;
  }
  return fit;
}

}  // namespace

McdFit functional_mcd(const WeightedMeasure& p, double gamma, const FunctionalOptions& opts) {
  p.validate();
  if (gamma <= 0.0 || gamma > 1.0) throw Error("functional_mcd: gamma must lie in (0,1]");
  if (opts.starts < 1) throw Error("functional_mcd: starts must be >= 1");
  const int k = p.k();

  std::vector<ChainResult> results(static_cast<std::size_t>(opts.starts));
  parallel_for(opts.starts, resolve_threads(opts.threads), [&](int s) {
    if (s == 0) {
      // deterministic chain from the full-measure moments
      TrimmedMoments full = trimmed_moments(p, TrimmingWeights{Vector::Ones(p.n())});
      results[0] = iterate_chain(p, gamma, full.T, full.C, opts.max_iterations);
      return;
    }
    Rng rng(opts.seed, static_cast<std::uint64_t>(s));
    for (int attempt = 0; attempt < 100; ++attempt) {
      std::vector<int> seedset = rng.subset(p.n(), std::min(p.n(), k + 1));
      Vector phi = Vector::Zero(p.n());
      for (int i : seedset) phi(i) = 1.0;
      TrimmedMoments mom = trimmed_moments(p, TrimmingWeights{phi});
      if (!is_pds(mom.C)) continue;
      ChainResult r = iterate_chain(p, gamma, mom.T, mom.C, opts.max_iterations);
      if (r.ok) {
        results[static_cast<std::size_t>(s)] = std::move(r);
        return;
      }
    }
  });

  const ChainResult* best = nullptr;
  for (const auto& r : results)
    if (r.ok && (!best || r.det < best->det)) best = &r;
  if (!best)
    throw DegenerateError("functional_mcd: all starts degenerate; a hyperplane may carry mass >= gamma");
  return finalize_functional(p, "functional", gamma, opts.seed, best->phi, best->mom,
                             best->iterations);
}

McdFit exact_functional_mcd(const WeightedMeasure& p, double gamma, int guard) {
  p.validate();
  if (gamma <= 0.0 || gamma > 1.0) throw Error("exact_functional_mcd: gamma must lie in (0,1]");
  const int n = p.n();
  if (n > guard)
    throw Error("exact_functional_mcd: " + std::to_string(n) + " atoms exceed the guard (" +
                std::to_string(guard) + ")");

  bool have_best = false;
  double best_det = 0.0;
  Vector best_phi;
  TrimmedMoments best_mom;
  bool saw_degenerate = false;

  const auto consider = [&](const Vector& phi) {
    TrimmedMoments mom = trimmed_moments(p, TrimmingWeights{phi});
    Shape shape(mom.C);
    if (shape.degenerate) {
      saw_degenerate = true;
      return;
    }
    const double det = shape.det();
    if (!have_best || det < best_det * (1.0 - kDetTieRel)) {
      have_best = true;
      best_det = det;
      best_phi = phi;
      best_mom = mom;
    }
  };

  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    double mass = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1ULL << i)) mass += p.weights(i);
    if (mass > gamma + 1e-12) continue;
    Vector phi = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      if (mask & (1ULL << i)) phi(i) = 1.0;
    if (mass >= gamma - 1e-12) {
      consider(phi);
      continue;
    }
    // one fractional boundary atom completes the mass to gamma
    for (int j = 0; j < n; ++j) {
      if (mask & (1ULL << j)) continue;
      const double frac = (gamma - mass) / p.weights(j);
      if (frac > 1.0 + 1e-12) continue;
      Vector cand = phi;
      cand(j) = std::min(frac, 1.0);
      consider(cand);
    }
  }
  if (!have_best) {
    if (saw_degenerate)
      throw DegenerateError("exact_functional_mcd: only degenerate candidates; hyperplane mass >= gamma");
    throw Error("exact_functional_mcd: no admissible trimming found");
  }
  return finalize_functional(p, "exact_functional", gamma, 0, best_phi, best_mom, 0);
}

CertificateReport certify_functional(const WeightedMeasure& p, const McdFit& fit, double gamma) {
  CertificateReport rep;
  if (!fit.weights) throw Error("certify_functional: fit carries no trimming weights");
  const Vector& phi = fit.weights->values;
  if (phi.size() != p.n()) throw Error("certify_functional: weight length mismatch");

  const double mass = fit.weights->mass(p);
  rep.mass_ok = std::abs(mass - gamma) <= 1e-10;
  if (!is_pds(fit.C)) {
    rep.degenerate = true;
    rep.separating_ellipsoid_ok = false;
    return rep;
  }
  const PdsMatrix shape(fit.C);
  const double r = radius(p, fit.T, shape, gamma);
  const double r2 = r * r;

  double max_violation = 0.0;  // measured in phi units
  int boundary = 0;
  int boundary_full = 0;
  int boundary_zero = 0;
  int fractional = 0;
  bool fractional_on_boundary = true;
  for (int i = 0; i < p.n(); ++i) {
    const double d2 = mahalanobis_sq(p.points.row(i).transpose(), fit.T, shape);
    const bool in_band = std::abs(d2 - r2) <= kBoundaryTol;
    const bool is_fractional = phi(i) > 1e-9 && phi(i) < 1.0 - 1e-9;
    if (in_band) {
      ++boundary;
      if (phi(i) >= 1.0 - 1e-9) ++boundary_full;
      if (phi(i) <= 1e-9) ++boundary_zero;
    }
    if (is_fractional) {
      ++fractional;
      if (!in_band) fractional_on_boundary = false;
    }
    if (d2 < r2 - kBoundaryTol) max_violation = std::max(max_violation, 1.0 - phi(i));
    if (d2 > r2 + kBoundaryTol) max_violation = std::max(max_violation, phi(i));
  }
  rep.boundary_atoms = boundary;
  rep.fractional_atoms = fractional;
  rep.max_violation = max_violation > 1e-9 ? max_violation : 0.0;
  rep.separating_ellipsoid_ok = rep.max_violation == 0.0 && fractional_on_boundary;
  rep.subsample_size_ok = fractional <= 1;
  if (boundary == 0)
    rep.boundary_case = "no_boundary_mass";
  else if (fractional == 1)
    rep.boundary_case = "fractional";
  else if (boundary_full == boundary)
    rep.boundary_case = "full";
  else if (boundary_zero == boundary)
    rep.boundary_case = "zero";
  else
    rep.boundary_case = "mixed";
  return rep;
}

}  // namespace mcd
