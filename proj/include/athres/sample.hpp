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
#include <optional>
#include <vector>

#include "athres/priority_family.hpp"
#include "athres/threshold_state.hpp"
#include "athres/weighted_item.hpp"

namespace athres {

// One retained item: the observation, its pseudo-inclusion probability
// F_i(tau_i) under the final threshold, and (for mergeable samples) the
// stored priority. generator_u is kept when the shared-uniform mode is
// active.
struct SampleItem {
  WeightedItem item;
  double inclusion_cdf = 1.0;
  std::optional<double> priority;
  std::optional<double> generator_u;
};

struct SampleCounters {
  std::uint64_t items_seen = 0;
  std::uint64_t heap_ops = 0;
  std::uint64_t threshold_updates = 0;
};

// The item whose priority realized the threshold, when the rule makes that
// an order statistic of stored priorities. Required by the threshold
// inclusion estimator.
struct ThresholdSource {
  WeightedItem item;
  double priority = 0.0;
};

// A finalized sample: retained items plus everything estimators need to treat
// them as conditionally independent given the threshold.
struct Sample {
  std::vector<SampleItem> items;
  ThresholdState threshold;
  PriorityFamily family;
  std::uint64_t seed = 0;
  SampleCounters counters;
  std::optional<ThresholdSource> source;

  std::size_t size() const { return items.size(); }
  int degree_cap() const { return threshold.resolve_degree_cap(items.size()); }
};

}  // namespace athres
