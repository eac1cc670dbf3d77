#pragma once

#include <cstdint>

#include "mcd/model.hpp"

namespace mcd {

struct FunctionalOptions {
  int starts = 50;
  std::uint64_t seed = 0;
  int max_iterations = 500;
  int threads = 1;
};

// MCD functional on a weighted discrete measure. Searches trimmings of the
// characterized minimizer form: full weight strictly inside an ellipsoid,
// fractional weight on at most one boundary atom, total trimmed mass exactly
// gamma. Multi-start concentration analogue of cstep_mcd, plus one
// deterministic chain started from the full-measure moments.
McdFit functional_mcd(const WeightedMeasure& p, double gamma, const FunctionalOptions& opts);

// Exhaustive oracle over candidates of the characterized form: every atom
// subset as strict interior plus every choice of one mass-completing
// boundary atom. Guarded by atom count.
McdFit exact_functional_mcd(const WeightedMeasure& p, double gamma, int guard = 14);

// Mass, sandwich and single-fractional-atom checks for a functional fit.
CertificateReport certify_functional(const WeightedMeasure& p, const McdFit& fit, double gamma);

}  // namespace mcd
