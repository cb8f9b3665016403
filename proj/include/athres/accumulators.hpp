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

namespace athres {

// Streaming mean/variance (Welford). Used both for Monte-Carlo summaries and
// as the rejected-item moment store inside threshold states.
struct Accumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Accumulator& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    double total = static_cast<double>(n + other.n);
    double d = other.mean - mean;
    m2 += other.m2 + d * d * static_cast<double>(n) * static_cast<double>(other.n) / total;
    mean += d * static_cast<double>(other.n) / total;
    n += other.n;
  }

  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double se_of_mean() const { return n > 1 ? stddev() / std::sqrt(static_cast<double>(n)) : 0.0; }

  // Standardized deviation of the Monte-Carlo mean from a hypothesized truth.
  // Degenerate (zero-spread) accumulators give 0 when exact and +inf when not.
  double z_against(double truth) const {
    double se = se_of_mean();
    double diff = mean - truth;
    if (se == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / se;
  }

  bool operator==(const Accumulator&) const = default;
};

}  // namespace athres
