#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "remest/errors.hpp"

namespace remest::rng {

// splitmix64 step; used both as a stream-seed mixer and to expand a
// 64-bit seed into the generator's initial state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d49b60b6635242ULL;
  return z ^ (z >> 31);
}

// Collapses (seed, policy, run) into a single stream seed. Each
// component passes through splitmix64 so that neighbouring run indices
// produce unrelated streams.
inline std::uint64_t derive_stream_seed(std::uint64_t seed,
                                        std::uint64_t policy_index,
                                        std::uint64_t run_index) {
  std::uint64_t s = seed;
  std::uint64_t acc = splitmix64(s);
  s = acc ^ (policy_index * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL);
  acc = splitmix64(s);
  s = acc ^ (run_index * 0xd6e8feb86659fd93ULL + 0xca8a58b92d9ed6b5ULL);
  return splitmix64(s);
}

// Deterministic random stream. All variate transforms are implemented
// by hand (never via std::uniform_real_distribution etc.) so the draw
// sequence is identical across standard-library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) {
    if (p < 0.0 || p > 1.0 || !std::isfinite(p))
      throw ConfigError("bernoulli probability outside [0, 1]");
    return uniform01() < p;
  }

  // Uniform integer in {0, ..., n-1}, rejection-sampled to avoid
  // modulo bias.
  int uniform_int(int n) {
    if (n <= 0) throw ConfigError("uniform_int needs n >= 1");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return static_cast<int>(r % un);
  }

  // Standard normal via the Box-Muller cosine branch. One variate per
  // call (no cached pair) keeps the consumption pattern obvious.
  double gaussian() {
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace remest::rng
