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
#include <vector>

#include "athres/merge.hpp"

namespace athres {

// Distributed sampling simulation: m nodes each draw uniform priorities over
// n items and keep their k smallest, the largest of which doubles as the node
// threshold (so the node threshold is the k-th smallest of n uniforms,
// Beta(k, n-k+1) distributed). The merged sample takes the minimum node
// threshold; the naive strategy re-thresholds the pooled top-k records.
struct DistributedWasteConfig {
  std::size_t nodes = 10;        // m
  std::size_t per_node_k = 100;  // records transferred per node
  std::size_t per_node_n = 10000;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
};

struct DistributedWasteResult {
  DistributedWasteConfig config;
  // Node thresholds across all replicates (m * replicates values).
  std::vector<double> node_taus;
  double mean_node_tau = 0.0;
  double mean_min_tau = 0.0;
  // Waste accounting from the last replicate.
  WasteReport min_merge;
  WasteReport naive;
};

DistributedWasteResult run_distributed_waste(const DistributedWasteConfig& config);

}  // namespace athres
