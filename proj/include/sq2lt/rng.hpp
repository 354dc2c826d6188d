#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace sq2lt {

// Deterministic pseudo-random stream addressed by (seed, stream index).
// xoshiro256++ state seeded through splitmix64 so that every (seed, stream)
// pair yields an independent, reproducible sequence regardless of how many
// streams are in flight or on which thread each one runs.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    // Distinct golden-ratio multiples keep stream 0 of seed s+1 from
    // colliding with stream 1 of seed s.
    std::uint64_t x = seed ^ (stream * 0x9E3779B97F4A7C15ULL) ^ 0xD1B54A32D192ED03ULL;
    for (auto& word : state_) {
      x += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
    // All-zero state is invalid for xoshiro; unreachable in practice but cheap to guard.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 0x1ULL;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to feed into log().
  double open01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n). Lemire's method with rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    std::uint64_t x = next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    std::uint64_t l = static_cast<std::uint64_t>(m);
    if (l < n) {
      std::uint64_t threshold = (0ULL - n) % n;
      while (l < threshold) {
        x = next_u64();
        m = static_cast<unsigned __int128>(x) * n;
        l = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
  std::uint64_t state_[4];
};

inline double exponential_variate(RngStream& rng, double rate) {
  return -std::log(rng.open01()) / rate;
}

// Unordered pair {a, b}, a != b, uniform over the K*(K-1)/2 pairs.
inline void sample_pair(RngStream& rng, std::size_t k, std::size_t& a, std::size_t& b) {
  a = static_cast<std::size_t>(rng.uniform_index(k));
  b = static_cast<std::size_t>(rng.uniform_index(k - 1));
  if (b >= a) ++b;
}

// Uniform d-subset of {0,...,k-1} by partial Fisher-Yates on a persistent
// identity array; swaps are undone afterwards so the scratch stays sorted.
class SubsetSampler {
 public:
  explicit SubsetSampler(std::size_t k) : idx_(k), swaps_(k) {
    for (std::size_t i = 0; i < k; ++i) idx_[i] = i;
  }

  void sample(RngStream& rng, std::size_t d, std::vector<std::size_t>& out) {
    const std::size_t k = idx_.size();
    out.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(k - i));
      std::swap(idx_[i], idx_[j]);
      swaps_[i] = j;
      out[i] = idx_[i];
    }
    for (std::size_t i = d; i-- > 0;) std::swap(idx_[i], idx_[swaps_[i]]);
  }

 private:
  std::vector<std::size_t> idx_;
  std::vector<std::size_t> swaps_;
};

}  // namespace sq2lt
