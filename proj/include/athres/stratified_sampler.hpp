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

#include <map>
#include <string>
#include <vector>

#include "athres/rng.hpp"
#include "athres/sample.hpp"

namespace athres {

// Memory-budgeted stratified sampler: one threshold per stratum, strata and
// item counts unknown in advance. When the total exceeds the budget, the most
// overallocated stratum sheds its largest priority, and that evicted priority
// becomes the stratum's new threshold. Proportional allocation emerges from
// the overallocation score k_s - (k_tot - 1) * n_s(t) / t.
class StratifiedSampler {
 public:
  struct Config {
    std::size_t budget = 0;
    std::uint64_t seed = 0;
    bool keyed_uniforms = false;
  };

  explicit StratifiedSampler(const Config& config) : config_(config), rng_(config.seed) {
    if (config.budget < 1) throw_error(errc::invalid_sample_size, "budget must be >= 1");
  }

  void add(const WeightedItem& item) {
    double u = config_.keyed_uniforms ? item_uniform(config_.seed, item.id) : rng_.next_unit_open();
    add_with_uniform(item, u);
  }

  void add_with_uniform(const WeightedItem& item, double u) {
    validate_weight(item.weight);
    const std::string label = item.stratum.value_or("");
    auto [it, fresh] = strata_.try_emplace(label);
    Stratum& stratum = it->second;
    if (fresh) {
      if (strata_.size() > config_.budget) {
        throw_error(errc::budget_exhausted, "budget smaller than the number of live strata");
      }
      stratum.tau = 1.0;
    }
    std::uint64_t seq = counters_.items_seen++;
    ++stratum.arrivals;
    double r = u / item.weight;
    if (r < stratum.tau) {
      stratum.entries.push_back(Entry{r, seq, item});
      ++total_retained_;
    } else {
      rejected_.push(item.x());
    }
    while (total_retained_ > config_.budget) shed_most_overallocated();
  }

  std::size_t retained() const { return total_retained_; }

  double tau_of(const std::string& label) const {
    auto it = strata_.find(label);
    return it == strata_.end() ? 1.0 : it->second.tau;
  }

  Sample finalize() const {
    Sample s;
    s.family = PriorityFamily::uniform();
    s.seed = config_.seed;
    s.counters = counters_;
    s.threshold.rejected = rejected_;
    for (const auto& [label, stratum] : strata_) {
      s.threshold.keyed[label] = stratum.tau;
      s.threshold.stratum_counts[label] = stratum.arrivals;
      for (const Entry& e : stratum.entries) {
        SampleItem si;
        si.item = e.item;
        si.priority = e.priority;
        si.inclusion_cdf = cdf_at(s.family, e.item.weight, stratum.tau);
        s.items.push_back(std::move(si));
      }
    }
    return s;
  }

 private:
  struct Entry {
    double priority;
    std::uint64_t seq;
    WeightedItem item;
  };

  struct Stratum {
    double tau = 1.0;
    std::uint64_t arrivals = 0;
    std::vector<Entry> entries;
  };

  void shed_most_overallocated() {
    ++counters_.threshold_updates;
    double t = static_cast<double>(counters_.items_seen);
    double k_tot = static_cast<double>(total_retained_);
    const std::string* best = nullptr;
    double best_score = 0.0;
    bool any_multi = false;
    for (const auto& [label, stratum] : strata_) {
      if (stratum.entries.empty()) continue;
      if (stratum.entries.size() > 1) any_multi = true;
      double score = static_cast<double>(stratum.entries.size()) -
                     (k_tot - 1.0) * static_cast<double>(stratum.arrivals) / t;
      // Ties break toward the smallest stratum label, which the map order
      // gives us for free.
      if (!best || score > best_score) {
        best = &label;
        best_score = score;
      }
    }
    if (!best) throw_error(errc::budget_exhausted, "nothing left to evict");
    Stratum& stratum = strata_.at(*best);
    if (stratum.entries.size() == 1 && !any_multi) {
      throw_error(errc::budget_exhausted, "every stratum is down to one item");
    }
    std::size_t max_idx = 0;
    for (std::size_t i = 1; i < stratum.entries.size(); ++i) {
      const Entry& a = stratum.entries[i];
      const Entry& b = stratum.entries[max_idx];
      if (a.priority > b.priority || (a.priority == b.priority && a.seq > b.seq)) max_idx = i;
    }
    // The stratum threshold never peeks at retained priorities: it is set to
    // the priority of the item being evicted, exactly.
    stratum.tau = stratum.entries[max_idx].priority;
    rejected_.push(stratum.entries[max_idx].item.x());
    stratum.entries[max_idx] = std::move(stratum.entries.back());
    stratum.entries.pop_back();
    --total_retained_;
  }

  Config config_;
  Rng rng_;
  std::map<std::string, Stratum> strata_;
  Accumulator rejected_;
  std::size_t total_retained_ = 0;
  SampleCounters counters_;
};

}  // namespace athres
