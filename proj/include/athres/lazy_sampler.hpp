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

#include <algorithm>
#include <vector>

#include "athres/rng.hpp"
#include "athres/sample.hpp"
#include "athres/threshold_rules.hpp"

namespace athres {

// Lazy priority sampler for general threshold rules (Wegman halving,
// variance-adapted sizes, compositions). Unlike the fast reservoir sampler it
// stores priorities, because arbitrary rules need them to decide evictions.
// The rejected-item statistic feeding adaptive rules is updated on every
// rejection and eviction, never from retained priorities.
class LazySampler {
 public:
  struct Config {
    std::size_t capacity = 0;  // 0 = unbounded by capacity (rule-driven only)
    RulePtr rule;
    PriorityFamily family = PriorityFamily::uniform();
    std::uint64_t seed = 0;
    bool keyed_uniforms = false;
  };

  explicit LazySampler(const Config& config) : config_(config), rng_(config.seed) {
    if (!config_.rule) throw_error(errc::parse_error, "lazy sampler needs a threshold rule");
    tau_ = config_.rule->initial_tau();
  }

  void add(const WeightedItem& item) {
    double u = config_.keyed_uniforms ? item_uniform(config_.seed, item.id) : rng_.next_unit_open();
    add_with_uniform(item, u);
  }

  void add_with_uniform(const WeightedItem& item, double u) {
    validate_weight(item.weight);
    if (config_.rule->updates_every_arrival()) {
      lower_tau(config_.rule->on_arrival(context()));
    }
    double r = inverse_cdf(config_.family, item.weight, u);
    std::uint64_t seq = counters_.items_seen++;
    if (r < tau_) {
      reservoir_.push_back(Entry{r, seq, item, u});
    } else {
      rejected_.push(item.x());
    }
    if (config_.capacity != 0 && reservoir_.size() > config_.capacity) {
      lower_tau(config_.rule->update(sorted_priorities(), context()));
      if (reservoir_.size() > config_.capacity) {
        // The rule did not shed enough; cap the size by sequentially applying
        // a fixed-size rule to the survivors, which preserves compatibility.
        lower_tau(fixed_k_threshold(sorted_priorities(), static_cast<int>(config_.capacity)));
      }
    }
  }

  double tau() const { return tau_; }
  std::size_t retained() const { return reservoir_.size(); }
  const Accumulator& rejected_stats() const { return rejected_; }

  Sample finalize() const {
    Sample s;
    s.family = config_.family;
    s.seed = config_.seed;
    s.counters = counters_;
    s.threshold.scalar = tau_;
    s.threshold.rejected = rejected_;
    s.threshold.degree_cap = config_.rule->degree_cap();
    s.items.reserve(reservoir_.size());
    for (const Entry& e : reservoir_) {
      SampleItem si;
      si.item = e.item;
      si.priority = e.priority;
      si.generator_u = e.u;
      si.inclusion_cdf = cdf_at(config_.family, e.item.weight, tau_);
      s.items.push_back(std::move(si));
    }
    if (source_) {
      s.source = source_;
      s.threshold.source_id = source_->item.id;
    }
    return s;
  }

 private:
  struct Entry {
    double priority;
    std::uint64_t seq;
    WeightedItem item;
    double u;
  };

  RuleContext context() const {
    return RuleContext{counters_.items_seen, &rejected_, tau_};
  }

  std::vector<double> sorted_priorities() const {
    std::vector<double> p;
    p.reserve(reservoir_.size());
    for (const Entry& e : reservoir_) p.push_back(e.priority);
    std::sort(p.begin(), p.end());
    return p;
  }

  void lower_tau(double next) {
    if (next > tau_) {
      throw_error(errc::threshold_increased, "threshold rule tried to raise the threshold");
    }
    if (next == tau_) return;
    tau_ = next;
    ++counters_.threshold_updates;
    evict_at_or_above(tau_);
  }

  void evict_at_or_above(double tau) {
    for (std::size_t i = 0; i < reservoir_.size();) {
      if (reservoir_[i].priority >= tau) {
        // A priority equal to the new threshold is the threshold item itself;
        // remember it for the threshold inclusion estimator.
        if (reservoir_[i].priority == tau) {
          source_ = ThresholdSource{reservoir_[i].item, reservoir_[i].priority};
        }
        rejected_.push(reservoir_[i].item.x());
        reservoir_[i] = std::move(reservoir_.back());
        reservoir_.pop_back();
      } else {
        ++i;
      }
    }
  }

  Config config_;
  Rng rng_;
  std::vector<Entry> reservoir_;
  Accumulator rejected_;
  double tau_ = kInfiniteThreshold;
  std::optional<ThresholdSource> source_;
  SampleCounters counters_;
};

}  // namespace athres
