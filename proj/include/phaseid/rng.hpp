// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace phaseid::rng {

// Counter-based generator: every draw is a pure hash of
// (seed, stream, index...), so draws can be produced in any order,
// from any thread, and remain identical run to run.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Well-known stream tags so independent uses never collide.
inline constexpr uint64_t kStreamLabels = 0x01;
inline constexpr uint64_t kStreamCurrents = 0x02;
inline constexpr uint64_t kStreamCoupling = 0x03;
inline constexpr uint64_t kStreamWeights = 0x04;
inline constexpr uint64_t kStreamBatch = 0x05;
inline constexpr uint64_t kStreamDerange = 0x06;
inline constexpr uint64_t kStreamNoise = 0x07;
inline constexpr uint64_t kStreamShuffle = 0x08;
inline constexpr uint64_t kStreamSelect = 0x09;
inline constexpr uint64_t kStreamKmeans = 0x0A;
inline constexpr uint64_t kStreamTest = 0x7E;

inline uint64_t hash_u64(uint64_t seed, uint64_t stream, uint64_t a = 0,
                         uint64_t b = 0, uint64_t c = 0) {
  uint64_t h = splitmix64(seed ^ 0xD1B54A32D192ED03ull);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  return h;
}

// Uniform in (0, 1]; never exactly 0 so it is safe under log().
inline double u01(uint64_t seed, uint64_t stream, uint64_t a = 0,
                  uint64_t b = 0, uint64_t c = 0) {
  return ((hash_u64(seed, stream, a, b, c) >> 11) + 1) * 0x1.0p-53;
}

double normal(uint64_t seed, uint64_t stream, uint64_t a = 0, uint64_t b = 0,
              uint64_t c = 0);

// Sequential stream for shuffles and one-off draws.
class Stream {
 public:
  Stream(uint64_t seed, uint64_t stream)
      : state_(hash_u64(seed, stream, 0x5EED)) {}

  uint64_t next_u64() { return state_ = splitmix64(state_); }
  double next_u01() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }
  double next_normal();
  // Unbiased draw from {0, ..., n-1}.
  size_t next_below(size_t n);

 private:
  uint64_t state_;
};

void shuffle(std::vector<size_t>& v, Stream& s);

// Random permutation of {0..n-1} with no fixed point.
std::vector<size_t> derangement(size_t n, Stream& s);

// Sorted uniform subset of size m from {0..n-1}, without replacement.
std::vector<size_t> sample_without_replacement(size_t n, size_t m, Stream& s);

}  // namespace phaseid::rng
