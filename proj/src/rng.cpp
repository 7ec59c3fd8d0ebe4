// SPDX-License-Identifier: Apache-2.0
#include "phaseid/rng.hpp"

#include <algorithm>
#include <cmath>

#include "phaseid/errors.hpp"

namespace phaseid::rng {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double normal(uint64_t seed, uint64_t stream, uint64_t a, uint64_t b, uint64_t c) {
  // Box-Muller on two sub-draws of the same counter.
  const double u1 = ((hash_u64(seed, stream, a, b, c * 2) >> 11) + 1) * 0x1.0p-53;
  const double u2 = ((hash_u64(seed, stream, a, b, c * 2 + 1) >> 11) + 1) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double Stream::next_normal() {
  const double u1 = next_u01();
  const double u2 = next_u01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

size_t Stream::next_below(size_t n) {
  if (n == 0) throw OutOfRange("Stream::next_below: n must be positive");
  // Rejection sampling to avoid modulo bias.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return static_cast<size_t>(v % n);
}

void shuffle(std::vector<size_t>& v, Stream& s) {
  for (size_t i = v.size(); i > 1; --i) {
    const size_t j = s.next_below(i);
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<size_t> derangement(size_t n, Stream& s) {
  std::vector<size_t> p(n);
  for (size_t i = 0; i < n; ++i) p[i] = i;
  if (n < 2) return p;
  shuffle(p, s);
  // Repair fixed points by swapping with a neighbour.
  for (size_t i = 0; i < n; ++i) {
    if (p[i] == i) std::swap(p[i], p[(i + 1) % n]);
  }
  return p;
}

std::vector<size_t> sample_without_replacement(size_t n, size_t m, Stream& s) {
  if (m > n) throw BadCardinality("sample_without_replacement: m > n");
  std::vector<size_t> pool(n);
  for (size_t i = 0; i < n; ++i) pool[i] = i;
  for (size_t i = 0; i < m; ++i) {
    const size_t j = i + s.next_below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(m);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace phaseid::rng
