// Copyright 2026 The athres Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed
// under the License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR
// CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace athres {

// SplitMix64 finalizer. Stateless; also used to derive per-item and
// per-replicate seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_bytes(std::string_view s, std::uint64_t seed) {
  // FNV-1a folded through mix64; not cryptographic, just well spread.
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix64(h);
}

// Maps a 64-bit word to the open interval (0,1). The +0.5 offset keeps both
// endpoints strictly excluded, which the priority math requires.
inline double to_unit_open(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

// Sequential stream generator (SplitMix64). Cheap enough for the 1e7-item
// benchmarks and statistically fine for Monte Carlo at the scales used here.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1).
  double next_unit_open() { return to_unit_open(next_u64()); }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Multiply-high mapping; bias is negligible for the n used here (< 2^32).
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

  double next_gaussian() {
    // Marsaglia polar method with one cached value.
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit_open() - 1.0;
      v = 2.0 * next_unit_open() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Beta(m, 1) variate via the exact inverse cdf U^{1/m}.
  double next_beta_m_1(double m) { return std::exp(std::log(next_unit_open()) / m); }

  // UniformRandomBitGenerator interface for std algorithms.
  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~0ULL; }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Splittable per-item uniform: U depends only on (stream seed, item id), so
// distributed workers and multi-objective samplers can share one U_i per item
// without coordination.
inline double item_uniform(std::uint64_t stream_seed, std::string_view item_id) {
  return to_unit_open(mix64(hash_bytes(item_id, stream_seed) ^ (stream_seed * 0x632be59bd9b4e019ULL)));
}

// Seed for replicate r of a seeded experiment.
inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) {
  return mix64(master_seed ^ mix64(replicate + 0x51ed2701ULL));
}

}  // namespace athres
