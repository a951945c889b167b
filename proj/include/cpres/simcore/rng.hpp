#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace cpres {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic seeded random stream. Identical (seed, stream_id) pairs
/// reproduce the identical draw sequence; distinct stream ids decorrelate
/// via splitmix64 key mixing. All distribution draws are implemented on
/// top of the raw 64-bit output so sequences do not depend on the
/// standard library's distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id), gen_(mix_key(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream keyed off this stream's identity. Does not consume draws.
  RngStream derive(std::uint64_t key) const {
    return RngStream(detail::splitmix64(seed_ ^ detail::splitmix64(key)),
                     stream_id_);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased uniform integer in [0, n), n >= 1.
  std::uint64_t uniform_int(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t rem = (UINT64_MAX % n + 1) % n;  // 2^64 mod n
    std::uint64_t x = next_u64();
    if (rem != 0) {
      const std::uint64_t threshold = std::uint64_t{0} - rem;  // 2^64 - rem
      while (x >= threshold) x = next_u64();
    }
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal(double mu = 0.0, double sigma = 1.0) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double z =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return mu + sigma * z;
  }

  template <class T>
  const T& choice(const std::vector<T>& items) {
    assert(!items.empty());
    return items[uniform_int(items.size())];
  }

  /// Fisher-Yates shuffle of an index permutation.
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = uniform_int(i);
      std::swap(p[i - 1], p[j]);
    }
    return p;
  }

 private:
  static std::uint64_t mix_key(std::uint64_t seed, std::uint64_t stream_id) {
    return detail::splitmix64(detail::splitmix64(seed) ^
                              detail::splitmix64(~stream_id * 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 gen_;
};

}  // namespace cpres
