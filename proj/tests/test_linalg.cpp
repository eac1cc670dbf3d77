#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcd/linalg.hpp"
#include "mcd/rng.hpp"
#include "test_util.hpp"

using namespace mcd;

TEST_CASE("pds_sqrt identity and diagonal") {
  const PdsMatrix id(Matrix::Identity(2, 2));
  CHECK((pds_sqrt(id).mat() - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const Matrix root = pds_sqrt(PdsMatrix(d)).mat();
  CHECK(root(0, 0) == doctest::Approx(2.0));
  CHECK(root(1, 1) == doctest::Approx(3.0));
  CHECK(root(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("pds_sqrt reproduces [[2,1],[1,2]] through its eigenvalues") {
  Matrix s(2, 2);
  s << 2.0, 1.0, 1.0, 2.0;
  const PdsMatrix g = pds_sqrt(PdsMatrix(s));
  CHECK((g.mat() * g.mat() - s).norm() / s.norm() < 1e-12);
  // eigenvalues of the root are sqrt(3) and 1
  CHECK(g.eigenvalues()(0) == doctest::Approx(1.0));
  CHECK(g.eigenvalues()(1) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("pds_sqrt round-trip on random matrices, k in 1..5") {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_int(5));
    const Matrix s = testutil::random_pds(rng, k);
    const PdsMatrix g = pds_sqrt(PdsMatrix(s));
    CHECK((g.mat() * g.mat() - s).norm() / s.norm() < 1e-10);
  }
}

TEST_CASE("PdsMatrix rejects bad inputs") {
  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(PdsMatrix{asym}, Error);

  Matrix negdef(2, 2);
  negdef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(PdsMatrix{negdef}, DegenerateError);

  Matrix singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(PdsMatrix{singular}, DegenerateError);
}

TEST_CASE("det_trace_test on the stated examples") {
  const PdsMatrix i2(Matrix::Identity(2, 2));
  const auto w1 = det_trace_test(0.5 * Matrix::Identity(2, 2), i2);
  CHECK(w1.trace_stat == doctest::Approx(-1.0));
  CHECK(w1.det1 == doctest::Approx(0.25));
  CHECK(w1.det2 == doctest::Approx(1.0));
  CHECK(w1.det1 < w1.det2);

  const PdsMatrix i3(Matrix::Identity(3, 3));
  const auto w2 = det_trace_test(Matrix::Identity(3, 3), i3);
  CHECK(w2.trace_stat == doctest::Approx(0.0));
  CHECK(w2.det1 == doctest::Approx(1.0));
  CHECK(w2.det2 == doctest::Approx(1.0));
}

TEST_CASE("determinant lemma holds on 1000 random trace-negative pairs") {
  Rng rng(7);
  int checked = 0;
  while (checked < 1000) {
    const int k = 1 + static_cast<int>(rng.uniform_int(4));
    const Matrix s1 = testutil::random_pds(rng, k, 0.05);
    const PdsMatrix s2(testutil::random_pds(rng, k, 0.05));
    const auto w = det_trace_test(s1, s2);
    if (w.trace_stat >= 0.0) continue;
    ++checked;
    CHECK(w.det1 < w.det2);
  }
}

TEST_CASE("mahalanobis_sq basics") {
  const PdsMatrix i2(Matrix::Identity(2, 2));
  Vector mu = Vector::Zero(2);
  CHECK(mahalanobis_sq(mu, mu, i2) == doctest::Approx(0.0));

  Vector x(2);
  x << 1.0, 0.0;
  CHECK(mahalanobis_sq(x, mu, i2) == doctest::Approx(1.0));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 1.0;
  Vector x2(2);
  x2 << 2.0, 0.0;
  CHECK(mahalanobis_sq(x2, mu, PdsMatrix(d)) == doctest::Approx(1.0));

  Vector x3(3);
  x3 << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(mahalanobis_sq(x3, mu, i2), Error);
}

TEST_CASE("mahalanobis_sq is affine invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng.uniform_int(4));
    const Vector x = testutil::random_vector(rng, k);
    const Vector mu = testutil::random_vector(rng, k);
    const Matrix s = testutil::random_pds(rng, k);
    const Matrix a = testutil::random_conditioned(rng, k, 20.0);
    const Vector b = testutil::random_vector(rng, k);
    const double d1 = mahalanobis_sq(x, mu, PdsMatrix(s));
    const double d2 = mahalanobis_sq(a * x + b, a * mu + b, PdsMatrix(a * s * a.transpose()));
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-9));
  }
}

TEST_CASE("vech round-trips exactly") {
  Rng rng(3);
  for (int k = 1; k <= 5; ++k) {
    const Matrix s = testutil::random_pds(rng, k);
    const Vector v = vech(s);
    CHECK(v.size() == k * (k + 1) / 2);
    CHECK((unvech(v, k) - s).cwiseAbs().maxCoeff() == 0.0);
  }
  // lower triangle column-major ordering
  Matrix s(2, 2);
  s << 1.0, 2.0, 2.0, 3.0;
  const Vector v = vech(s);
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 2.0);
  CHECK(v(2) == 3.0);
}
