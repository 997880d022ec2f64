#include "zap/rng.hpp"

#include "zap/numeric.hpp"

namespace zap {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  // splitmix64 finalizer applied to the combined state.
  std::uint64_t z = master ^ (stream + 0x9e3779b97f4a7c15ULL);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::normal() { return normal_quantile(uniform()); }

std::vector<double> Rng::uniforms(std::size_t n) {
  std::vector<double> out(n);
  for (double& v : out) v = uniform();
  return out;
}

}  // namespace zap
