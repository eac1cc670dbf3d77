#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "mcd/estimator.hpp"
#include "mcd/functional.hpp"
#include "mcd/rng.hpp"
#include "test_util.hpp"

using namespace mcd;

namespace {

WeightedMeasure random_uniform_measure(Rng& rng, int n, int k) {
  WeightedMeasure p;
  p.points = testutil::random_matrix(rng, n, k);
  p.weights = Vector::Constant(n, 1.0 / n);
  return p;
}

WeightedMeasure random_weighted_measure(Rng& rng, int n, int k) {
  WeightedMeasure p;
  p.points = testutil::random_matrix(rng, n, k);
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = 0.2 + rng.uniform01();
  p.weights = w / w.sum();
  return p;
}

}  // namespace

TEST_CASE("functional on uniform weights with integral n*gamma matches cstep") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Dataset d = testutil::random_gaussian_dataset(rng, 12, 2);
    CstepOptions copts;
    copts.starts = 100;
    copts.seed = 3;
    const McdFit est = cstep_mcd(d, 0.5, copts);
    FunctionalOptions fopts;
    fopts.starts = 100;
    fopts.seed = 3;
    const McdFit fun = functional_mcd(WeightedMeasure::uniform(d), 0.5, fopts);
    CHECK(fun.det == doctest::Approx(est.det).epsilon(1e-9));
    CHECK(fun.certificate.fractional_atoms == 0);
    CHECK(fun.certificate.passed());
  }
}

TEST_CASE("non-integral n*gamma puts the stated fraction on exactly one atom") {
  Rng rng(9);
  const int n = 10;
  const double gamma = 0.55;  // n*gamma = 5.5
  const WeightedMeasure p = random_uniform_measure(rng, n, 2);
  FunctionalOptions opts;
  opts.starts = 60;
  const McdFit fit = functional_mcd(p, gamma, opts);
  REQUIRE(fit.weights.has_value());
  const Vector& phi = fit.weights->values;
  int ones = 0, fracs = 0;
  double frac_value = 0.0;
  for (int i = 0; i < n; ++i) {
    if (phi(i) >= 1.0 - 1e-9)
      ++ones;
    else if (phi(i) > 1e-9) {
      ++fracs;
      frac_value = phi(i);
    }
  }
  CHECK(ones == 5);
  CHECK(fracs == 1);
  CHECK(frac_value == doctest::Approx(0.5).epsilon(1e-9));  // n*gamma - floor
  CHECK(fit.weights->mass(p) == doctest::Approx(gamma).epsilon(1e-12));
  CHECK(fit.certificate.passed());
}

TEST_CASE("far point mass receives weight zero and rescales the level") {
  Rng rng(10);
  WeightedMeasure clean = random_uniform_measure(rng, 9, 2);
  const double eps = 0.1, gamma = 0.5;
  Vector far(2);
  far << 500.0, -400.0;
  const WeightedMeasure dirty = clean.perturbed(far, eps);

  FunctionalOptions opts;
  opts.starts = 120;
  opts.seed = 5;
  const McdFit fit_dirty = functional_mcd(dirty, gamma, opts);
  REQUIRE(fit_dirty.weights.has_value());
  CHECK(fit_dirty.weights->values(9) == 0.0);

  const McdFit fit_clean = functional_mcd(clean, gamma / (1.0 - eps), opts);
  CHECK((fit_dirty.T - fit_clean.T).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((fit_dirty.C - fit_clean.C).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("exact functional on four uniform atoms enumerates the pairs") {
  // gamma = 1/2 with four atoms of weight 1/4: candidates are the six pairs,
  // all singular, plus pair+fraction triples; the best non-degenerate
  // candidate must match a brute-force scan in this tiny geometry
  WeightedMeasure p;
  p.points.resize(4, 1);
  p.points << 0.0, 1.0, 3.0, 7.0;
  p.weights = Vector::Constant(4, 0.25);
  const McdFit fit = exact_functional_mcd(p, 0.5);
  // brute force over interior pair + fractional third atom in 1-d
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      for (int b = 0; b < 4; ++b) {
        if (b == i || b == j) continue;
        Vector phi = Vector::Zero(4);
        phi(i) = phi(j) = 1.0;
        // fraction 0: exactly the pair (mass 0.5)
        for (double f : {0.0}) {
          phi(b) = f;
          const auto mom = trimmed_moments(p, TrimmingWeights{phi});
          best = std::min(best, psd_det(mom.C));
        }
      }
    }
  CHECK(fit.det <= best + 1e-12);
  CHECK(fit.certificate.passed());
}

TEST_CASE("exact functional at gamma = 1 is the full-measure moments") {
  Rng rng(12);
  const WeightedMeasure p = random_weighted_measure(rng, 8, 2);
  const McdFit fit = exact_functional_mcd(p, 1.0);
  const auto mom = trimmed_moments(p, TrimmingWeights{Vector::Ones(8)});
  CHECK((fit.T - mom.T).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((fit.C - mom.C).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("exact functional guard") {
  Rng rng(13);
  const WeightedMeasure p = random_uniform_measure(rng, 16, 2);
  CHECK_THROWS_AS(exact_functional_mcd(p, 0.5), Error);
}

TEST_CASE("multistart functional agrees with the exhaustive oracle") {
  Rng rng(14);
  int agree = 0;
  const int instances = 40;
  for (int t = 0; t < instances; ++t) {
    const WeightedMeasure p = random_weighted_measure(rng, 10, 2);
    const McdFit oracle = exact_functional_mcd(p, 0.5);
    FunctionalOptions opts;
    opts.starts = 200;
    opts.seed = static_cast<std::uint64_t>(t);
    const McdFit heur = functional_mcd(p, 0.5, opts);
    CHECK(heur.det >= oracle.det - 1e-12);
    CHECK(heur.certificate.passed());
    if (heur.det <= oracle.det + 1e-9 * std::max(1.0, oracle.det)) ++agree;
  }
  CHECK(agree >= 36);  // >= 90%
}

TEST_CASE("certify_functional flags a hand-built interior violation") {
  Rng rng(15);
  const WeightedMeasure p = random_uniform_measure(rng, 10, 2);
  FunctionalOptions opts;
  opts.starts = 50;
  McdFit fit = functional_mcd(p, 0.6, opts);
  REQUIRE(fit.certificate.passed());

  // put half weight on an interior atom: the sandwich must fail
  McdFit broken = fit;
  Vector phi = fit.weights->values;
  const PdsMatrix shape(fit.C);
  int interior = -1;
  for (int i = 0; i < p.n(); ++i) {
    const double d2 = mahalanobis_sq(p.points.row(i).transpose(), fit.T, shape);
    if (phi(i) >= 1.0 - 1e-12 && d2 < fit.radius * fit.radius - 1e-6) {
      interior = i;
      break;
    }
  }
  REQUIRE(interior >= 0);
  phi(interior) = 0.5;
  broken.weights = TrimmingWeights{phi};
  const CertificateReport rep = certify_functional(p, broken, 0.6);
  CHECK_FALSE(rep.separating_ellipsoid_ok);
  CHECK_FALSE(rep.mass_ok);
}

TEST_CASE("functional affine equivariance") {
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const WeightedMeasure p = random_weighted_measure(rng, 11, 2);
    const Matrix a = testutil::random_conditioned(rng, 2, 8.0);
    const Vector b = testutil::random_vector(rng, 2);
    FunctionalOptions opts;
    opts.starts = 150;
    opts.seed = 21;
    const McdFit fit = functional_mcd(p, 0.5, opts);
    const McdFit mapped = functional_mcd(affine_map(p, a, b), 0.5, opts);
    const Vector expected_t = a * fit.T + b;
    const Matrix expected_c = a * fit.C * a.transpose();
    CHECK((mapped.T - expected_t).norm() / std::max(1.0, expected_t.norm()) < 1e-8);
    CHECK((mapped.C - expected_c).norm() / expected_c.norm() < 1e-8);
  }
}

TEST_CASE("functional concentration never increases the determinant") {
  // monotonicity is asserted inside the solver; a run without an exception
  // plus a certified result is the observable contract
  Rng rng(18);
  const WeightedMeasure p = random_weighted_measure(rng, 40, 3);
  FunctionalOptions opts;
  opts.starts = 30;
  const McdFit fit = functional_mcd(p, 0.5, opts);
  CHECK(fit.certificate.passed());
  CHECK(fit.iterations >= 1);
}

TEST_CASE("degenerate measures are reported") {
  WeightedMeasure line;
  line.points.resize(8, 2);
  for (int i = 0; i < 8; ++i) {
    line.points(i, 0) = i;
    line.points(i, 1) = -3.0 * i;
  }
  line.weights = Vector::Constant(8, 0.125);
  FunctionalOptions opts;
  opts.starts = 10;
  CHECK_THROWS_AS(functional_mcd(line, 0.5, opts), DegenerateError);
}
