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

#include <cstddef>
#include <span>
#include <vector>

#include "athres/sample.hpp"

namespace athres {

// Merges independently drawn node samples by taking the minimum of the node
// thresholds and re-filtering the union of items against it. Requires equal
// families, stored priorities, and disjoint item ids across nodes.
Sample merge_samples(std::span<const Sample> envelopes);

enum class MergeStrategy { min_merge, naive_topk };

// Accounting for a distributed merge: how many item records the nodes
// transferred and how many survive under each strategy.
struct WasteReport {
  MergeStrategy strategy = MergeStrategy::min_merge;
  std::size_t nodes = 0;
  std::size_t transferred = 0;
  std::size_t retained = 0;
  double retention_ratio = 0.0;
  double tau_used = 0.0;
  std::vector<double> node_taus;
};

// `naive_k` is the final sample size the naive strategy keeps: the union of
// everything transferred is cut at its (naive_k + 1)-th smallest priority.
WasteReport waste_report(std::span<const Sample> envelopes, MergeStrategy strategy,
                         std::size_t naive_k = 0);

}  // namespace athres
