// Deterministic random number generation. All randomness in the library goes
// through this wrapper so that runs are bit-reproducible for a fixed seed
// regardless of platform stdlib distribution implementations.
#ifndef BLOCKMC_RNG_HPP
#define BLOCKMC_RNG_HPP

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

namespace blockmc {

// splitmix64, used to derive well-separated seeds for substreams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ mix64(stream + 0x51ed2701a9u));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased.
  int uniform_int(int n) {
    assert(n > 0);
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return static_cast<int>(r % un);
  }

  // Uniform pair i != j in [0, n).
  std::pair<int, int> distinct_pair(int n) {
    assert(n >= 2);
    int i = uniform_int(n);
    int j = uniform_int(n - 1);
    if (j >= i) ++j;
    return {i, j};
  }

  // Fisher-Yates permutation of {0..n-1}.
  void permutation(int n, std::vector<int>& out) {
    out.resize(n);
    for (int i = 0; i < n; ++i) out[i] = i;
    for (int i = n - 1; i > 0; --i) {
      int j = uniform_int(i + 1);
      std::swap(out[i], out[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace blockmc

#endif
