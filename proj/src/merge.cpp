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

#include "athres/merge.hpp"

#include <algorithm>
#include <unordered_set>

#include "athres/envelope.hpp"
#include "athres/threshold_rules.hpp"

namespace athres {

Sample merge_samples(std::span<const Sample> envelopes) {
  if (envelopes.empty()) {
    throw_error(errc::insufficient_sample, "nothing to merge");
  }
  const Sample& first = envelopes.front();
  for (const Sample& e : envelopes) {
    if (!(e.family == first.family)) {
      throw_error(errc::incompatible_families, "envelopes use different priority families");
    }
    if (!envelope_mergeable(e)) {
      throw_error(errc::not_mergeable, "envelope lacks stored priorities; cannot re-filter");
    }
  }

  Sample merged;
  merged.family = first.family;
  merged.seed = first.seed;
  merged.threshold = first.threshold;
  for (std::size_t i = 1; i < envelopes.size(); ++i) {
    merged.threshold = merge_min(merged.threshold, envelopes[i].threshold);
  }
  // merge_min keeps the argmin side's source id; carry the matching source
  // item record so threshold inclusion stays available after the merge.
  merged.source.reset();
  if (merged.threshold.source_id) {
    for (const Sample& e : envelopes) {
      if (e.source && e.source->item.id == *merged.threshold.source_id &&
          e.source->priority == merged.threshold.scalar) {
        merged.source = e.source;
        break;
      }
    }
    if (!merged.source) merged.threshold.source_id.reset();
  }

  merged.counters = SampleCounters{};
  std::unordered_set<std::string> seen_ids;
  for (const Sample& e : envelopes) {
    merged.counters.items_seen += e.counters.items_seen;
    merged.counters.heap_ops += e.counters.heap_ops;
    merged.counters.threshold_updates += e.counters.threshold_updates;
    for (const SampleItem& si : e.items) {
      if (!seen_ids.insert(si.item.id).second) {
        throw_error(errc::duplicate_item,
                    "item '" + si.item.id + "' appears on more than one node");
      }
      double tau = merged.threshold.tau_for(si.item.stratum);
      if (!(*si.priority < tau)) continue;
      SampleItem kept = si;
      kept.inclusion_cdf = cdf_at(merged.family, kept.item.weight, tau);
      merged.items.push_back(std::move(kept));
    }
  }
  std::sort(merged.items.begin(), merged.items.end(),
            [](const SampleItem& a, const SampleItem& b) { return a.item.id < b.item.id; });
  return merged;
}

WasteReport waste_report(std::span<const Sample> envelopes, MergeStrategy strategy,
                         std::size_t naive_k) {
  if (envelopes.size() < 2) {
    throw_error(errc::insufficient_sample, "waste report needs at least two envelopes");
  }
  WasteReport report;
  report.strategy = strategy;
  report.nodes = envelopes.size();
  for (const Sample& e : envelopes) {
    report.transferred += e.items.size() + (e.source ? 1 : 0);
    report.node_taus.push_back(e.threshold.scalar);
  }

  if (strategy == MergeStrategy::min_merge) {
    Sample merged = merge_samples(envelopes);
    report.retained = merged.items.size();
    report.tau_used = merged.threshold.scalar;
  } else {
    // Naive top-k: pool every transferred priority and keep the naive_k
    // smallest, threshold at the (naive_k + 1)-th.
    std::vector<double> priorities;
    priorities.reserve(report.transferred);
    for (const Sample& e : envelopes) {
      for (const SampleItem& si : e.items) {
        if (!si.priority) {
          throw_error(errc::not_mergeable, "naive strategy needs stored priorities");
        }
        priorities.push_back(*si.priority);
      }
      if (e.source) priorities.push_back(e.source->priority);
    }
    if (naive_k == 0) throw_error(errc::invalid_sample_size, "naive strategy needs k >= 1");
    double tau = fixed_k_threshold(priorities, static_cast<int>(naive_k));
    std::size_t kept = 0;
    for (double p : priorities) {
      if (p < tau) ++kept;
    }
    report.retained = kept;
    report.tau_used = tau;
  }
  report.retention_ratio =
      report.transferred == 0
          ? 0.0
          : static_cast<double>(report.retained) / static_cast<double>(report.transferred);
  return report;
}

}  // namespace athres
