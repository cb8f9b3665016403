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

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "athres/accumulators.hpp"
#include "athres/errors.hpp"
#include "athres/priority_family.hpp"

namespace athres {

// Degree cap sentinel: the threshold is strongly substitution compatible, so
// estimators may use interactions up to the realized sample size |J|.
inline constexpr int kDegreeCapSampleSize = -1;

// Threshold record plus the auxiliary summary of rejected items. The summary
// is a function of rejected/evicted items and the threshold only - samplers
// update it exclusively on rejection and eviction, never from retained
// priorities.
struct ThresholdState {
  // Scalar threshold, used when `keyed` is empty.
  double scalar = kInfiniteThreshold;
  // Per-stratum or per-objective thresholds.
  std::map<std::string, double> keyed;

  // Moments of rejected item values (count, running mean, second moment).
  Accumulator rejected;
  // Per-stratum arrival counts n_s(t).
  std::map<std::string, std::uint64_t> stratum_counts;

  // Id of the item whose priority equals the threshold, when the rule makes
  // the threshold an order statistic of stored priorities.
  std::optional<std::string> source_id;

  // Highest interaction degree estimators may use; kDegreeCapSampleSize means
  // "up to |J|".
  int degree_cap = kDegreeCapSampleSize;

  bool is_keyed() const { return !keyed.empty(); }

  double tau_for(const std::optional<std::string>& key) const {
    if (keyed.empty()) return scalar;
    if (!key) {
      throw_error(errc::incompatible_thresholds, "keyed threshold requires a stratum/objective key");
    }
    auto it = keyed.find(*key);
    if (it == keyed.end()) {
      throw_error(errc::incompatible_thresholds, "no threshold for key '" + *key + "'");
    }
    return it->second;
  }

  int resolve_degree_cap(std::size_t sample_size) const {
    return degree_cap == kDegreeCapSampleSize ? static_cast<int>(sample_size) : degree_cap;
  }
};

namespace detail {

inline int combined_cap_min(int a, int b) {
  if (a == kDegreeCapSampleSize) return b;
  if (b == kDegreeCapSampleSize) return a;
  return a < b ? a : b;
}

inline void check_aligned(const ThresholdState& a, const ThresholdState& b) {
  if (a.is_keyed() != b.is_keyed()) {
    throw_error(errc::incompatible_thresholds, "cannot merge scalar and keyed thresholds");
  }
  if (a.is_keyed()) {
    if (a.keyed.size() != b.keyed.size()) {
      throw_error(errc::incompatible_thresholds, "keyed thresholds have different key sets");
    }
    for (const auto& [key, value] : a.keyed) {
      (void)value;
      if (!b.keyed.count(key)) {
        throw_error(errc::incompatible_thresholds, "keyed thresholds have different key sets");
      }
    }
  }
}

inline ThresholdState merge_common(const ThresholdState& a, const ThresholdState& b) {
  ThresholdState out;
  out.rejected = a.rejected;
  out.rejected.merge(b.rejected);
  out.stratum_counts = a.stratum_counts;
  for (const auto& [key, count] : b.stratum_counts) out.stratum_counts[key] += count;
  return out;
}

}  // namespace detail

// Elementwise minimum. Preserves the strong substitution compatibility of the
// inputs, so the degree cap is the tighter of the two.
inline ThresholdState merge_min(const ThresholdState& a, const ThresholdState& b) {
  detail::check_aligned(a, b);
  ThresholdState out = detail::merge_common(a, b);
  out.degree_cap = detail::combined_cap_min(a.degree_cap, b.degree_cap);
  if (a.is_keyed()) {
    for (const auto& [key, tau] : a.keyed) out.keyed[key] = std::min(tau, b.keyed.at(key));
  } else {
    out.scalar = std::min(a.scalar, b.scalar);
    out.source_id = a.scalar <= b.scalar ? a.source_id : b.source_id;
  }
  return out;
}

// Elementwise maximum. Only degree-1 estimators remain licensed on the result.
inline ThresholdState merge_max(const ThresholdState& a, const ThresholdState& b) {
  detail::check_aligned(a, b);
  ThresholdState out = detail::merge_common(a, b);
  out.degree_cap = 1;
  if (a.is_keyed()) {
    for (const auto& [key, tau] : a.keyed) out.keyed[key] = std::max(tau, b.keyed.at(key));
  } else {
    out.scalar = std::max(a.scalar, b.scalar);
    out.source_id = a.scalar >= b.scalar ? a.source_id : b.source_id;
  }
  return out;
}

}  // namespace athres
