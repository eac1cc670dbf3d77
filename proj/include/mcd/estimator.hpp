#pragma once

#include <cstdint>
#include <vector>

#include "mcd/model.hpp"

namespace mcd {

// Smallest integer >= n * gamma, robust to floating point noise.
int subsample_size(int n, double gamma);

struct SubsampleMoments {
  Vector T;
  Matrix C;  // normalized by |S|, not |S|-1
};

SubsampleMoments subsample_moments(const Dataset& d, const std::vector<int>& s);

struct ExactOptions {
  int guard = 20;  // refuse exhaustive enumeration above this n
};

// Exhaustive MCD: minimize det over all subsamples of size exactly
// ceil(n*gamma). Ties within 1e-12 relative determinant resolve to the
// lexicographically smallest index set.
McdFit exact_mcd(const Dataset& d, double gamma, const ExactOptions& opts = {});

struct CstepOptions {
  int starts = 500;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  int threads = 1;
};

// Multi-start concentration solver: random (k+1)-subsets inflated to their h
// nearest points, then concentration steps until the subsample repeats or the
// determinant stalls. The determinant never increases along a chain.
McdFit cstep_mcd(const Dataset& d, double gamma, const CstepOptions& opts);

// Repeatedly delete the in-subsample point of maximal Mahalanobis distance
// until |S| = target_h; each deletion cannot increase the determinant.
std::vector<int> greedy_delete(const Dataset& d, std::vector<int> s, int target_h);

// Separating ellipsoid certificate for an estimator fit.
CertificateReport certify_estimator(const Dataset& d, const McdFit& fit, double gamma);

}  // namespace mcd
