#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace zap {

// Derives an independent stream seed from a master seed and a stream index.
// splitmix64 over the xored pair gives well-separated streams for any
// (master, stream) combination, so repetitions can run in any order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

// Seeded generator with platform-independent draws: uniforms come straight
// from the top 53 bits of the engine output and normals go through the
// normal quantile, so identical seeds give identical streams everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // Strictly inside (0,1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) %
           (n == 0 ? 1 : n);
  }

  std::vector<double> uniforms(std::size_t n);

 private:
  std::mt19937_64 gen_;
};

}  // namespace zap
