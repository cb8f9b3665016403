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

#include "athres/distributed_waste.hpp"

#include <algorithm>

#include "athres/heap_sampler.hpp"
#include "athres/rng.hpp"

namespace athres {

DistributedWasteResult run_distributed_waste(const DistributedWasteConfig& config) {
  if (config.nodes < 1 || config.per_node_k < 2 || config.per_node_n <= config.per_node_k) {
    throw_error(errc::invalid_sample_size, "need m >= 1, k >= 2, n > k");
  }
  DistributedWasteResult result;
  result.config = config;
  result.node_taus.reserve(config.nodes * config.replicates);

  Accumulator tau_acc;
  Accumulator min_acc;
  std::vector<Sample> last_envelopes;

  WeightedItem scratch;
  scratch.weight = 1.0;

  for (std::size_t rep = 0; rep < config.replicates; ++rep) {
    std::vector<Sample> envelopes;
    envelopes.reserve(config.nodes);
    double tau_min = kInfiniteThreshold;
    for (std::size_t node = 0; node < config.nodes; ++node) {
      HeapSampler::Config nc;
      // k transferred records = k-1 sample items + the threshold item.
      nc.k = static_cast<int>(config.per_node_k) - 1;
      nc.seed = replicate_seed(config.seed, rep * config.nodes + node);
      HeapSampler sampler(nc);
      Rng rng(mix64(nc.seed ^ 0xd1f54a3bULL));
      for (std::size_t i = 0; i < config.per_node_n; ++i) {
        double u = rng.next_unit_open();
        // Unit weights make the priority equal to u; skip the copy when it
        // cannot enter the heap.
        if (u >= sampler.tau()) {
          sampler.skip_rejected();
          continue;
        }
        scratch.id = "n" + std::to_string(node) + "_" + std::to_string(i);
        sampler.add_with_uniform(scratch, u);
      }
      Sample s = sampler.finalize();
      double tau = s.threshold.scalar;
      result.node_taus.push_back(tau);
      tau_acc.push(tau);
      tau_min = std::min(tau_min, tau);
      envelopes.push_back(std::move(s));
    }
    min_acc.push(tau_min);
    if (rep + 1 == config.replicates) last_envelopes = std::move(envelopes);
  }

  result.mean_node_tau = tau_acc.mean;
  result.mean_min_tau = min_acc.mean;
  result.min_merge = waste_report(last_envelopes, MergeStrategy::min_merge);
  result.naive = waste_report(last_envelopes, MergeStrategy::naive_topk, config.per_node_k);
  return result;
}

}  // namespace athres
