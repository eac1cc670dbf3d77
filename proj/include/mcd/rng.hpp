#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mcd {

// Seeded random stream. Streams with the same (seed, stream) pair always
// produce the same sequence; distinct stream ids give independent sequences,
// which is how replicas and multistart chains stay reproducible regardless
// of the thread count.
//
// All variate transformations are implemented explicitly on top of
// mt19937_64 so output does not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0xbf58476d1ce4e5b9ULL))) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform on {0,...,n-1} by rejection (no modulo bias).
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze.
  double gamma(double shape);

  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

  // m distinct indices from {0,...,n-1}, sorted ascending (Floyd's method).
  std::vector<int> subset(int n, int m);

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mcd
