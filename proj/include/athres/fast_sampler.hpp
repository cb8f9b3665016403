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
#include <optional>
#include <vector>

#include "athres/rng.hpp"
#include "athres/sample.hpp"

namespace athres {

// Fast priority reservoir sampler for uniform-scaled priorities R = U/w.
//
// Retained items are split into a reservoir, whose priorities are implicitly
// exchangeable Uniform(0, tau) and therefore not stored, and a heavy-item set
// holding items with 1/w < tau, which are retained with certainty and keep
// their priorities. On overflow the candidate thresholds from the two sides
// compete: the reservoir side draws its implicit maximum tau*Beta(m,1), the
// heavy side offers its stored maximum; the larger becomes the new threshold
// and that side evicts one item.
//
// Once the heavy set empties and a registered weight bound M guarantees
// 1/M >= tau, updates degenerate to the steady-state form: constant work per
// item, no heavy-set operations, no stored priorities.
class FastSampler {
 public:
  // Scale of the Beta variate drawn for the reservoir-side threshold
  // candidate. `reservoir_size` treats every current reservoir priority as a
  // candidate, which reproduces the heap baseline's retained-set law (the
  // default). `reservoir_size_minus_one` drops one candidate; it shrinks the
  // threshold too fast and exists so tests can demonstrate the discrepancy.
  enum class BetaConvention { reservoir_size, reservoir_size_minus_one };

  struct Config {
    int k = 1;
    std::uint64_t seed = 0;
    // Upper bound on arriving weights; enables the steady-state transition.
    std::optional<double> weight_bound;
    bool allow_steady = true;
    // Consecutive heavy-free updates required before switching (0 = switch as
    // soon as the bound condition holds).
    int steady_streak = 0;
    BetaConvention beta = BetaConvention::reservoir_size;
  };

  explicit FastSampler(const Config& config) : config_(config), rng_(config.seed) {
    if (config.k < 1) throw_error(errc::invalid_sample_size, "sample size must be >= 1");
    reservoir_.reserve(static_cast<std::size_t>(config.k) + 1);
  }

  void add(const WeightedItem& item) { add_with_uniform(item, rng_.next_unit_open()); }

  void add_with_uniform(const WeightedItem& item, double u) {
    validate_weight(item.weight);
    ++counters_.items_seen;
    if (steady_) {
      steady_add(item, u);
      return;
    }
    double r = u / item.weight;
    double inv_w = 1.0 / item.weight;
    if (inv_w < tau_) {
      heavy_.push_back(HeavyEntry{r, item});
      ++counters_.heap_ops;
    } else if (r < tau_) {
      reservoir_.push_back(item);
    }
    if (reservoir_.size() + heavy_.size() > static_cast<std::size_t>(config_.k)) {
      overflow();
    }
    maybe_enter_steady();
  }

  bool steady_state() const { return steady_; }
  double tau() const { return tau_; }
  std::size_t retained() const { return reservoir_.size() + heavy_.size(); }
  const SampleCounters& counters() const { return counters_; }

  // Visits (item, inclusion cdf) for every retained item without building a
  // Sample; refit loops call this once per batch.
  template <typename Fn>
  void for_each_retained(Fn&& fn) const {
    for (const WeightedItem& item : reservoir_) {
      fn(item, std::min(1.0, item.weight * tau_));
    }
    for (const HeavyEntry& e : heavy_) {
      fn(e.item, std::min(1.0, e.item.weight * tau_));
    }
  }

  Sample finalize() const {
    Sample s;
    s.family = PriorityFamily::uniform();
    s.seed = config_.seed;
    s.counters = counters_;
    s.threshold.scalar = tau_;
    s.items.reserve(retained());
    for (const WeightedItem& item : reservoir_) {
      SampleItem si;
      si.item = item;
      si.inclusion_cdf = cdf_at(s.family, item.weight, tau_);
      s.items.push_back(std::move(si));
    }
    for (const HeavyEntry& e : heavy_) {
      SampleItem si;
      si.item = e.item;
      si.priority = e.priority;
      si.inclusion_cdf = cdf_at(s.family, e.item.weight, tau_);
      s.items.push_back(std::move(si));
    }
    return s;
  }

 private:
  struct HeavyEntry {
    double priority;
    WeightedItem item;
  };

  double beta_factor(std::size_t candidates) {
    double m = static_cast<double>(candidates);
    if (config_.beta == BetaConvention::reservoir_size_minus_one) m -= 1.0;
    if (m < 1.0) return 0.0;
    return rng_.next_beta_m_1(m);
  }

  void overflow() {
    ++counters_.threshold_updates;
    double tau_r = 0.0;
    if (!reservoir_.empty() && tau_ < kInfiniteThreshold) {
      tau_r = tau_ * beta_factor(reservoir_.size());
    }
    double tau_h = 0.0;
    std::size_t h_max = 0;
    if (!heavy_.empty()) {
      for (std::size_t i = 1; i < heavy_.size(); ++i) {
        if (heavy_[i].priority > heavy_[h_max].priority) h_max = i;
      }
      tau_h = heavy_[h_max].priority;
    }
    if (tau_r > tau_h) {
      tau_ = tau_r;
      std::size_t victim = rng_.next_below(reservoir_.size());
      reservoir_[victim] = std::move(reservoir_.back());
      reservoir_.pop_back();
    } else {
      tau_ = tau_h;
      heavy_[h_max] = std::move(heavy_.back());
      heavy_.pop_back();
      ++counters_.heap_ops;
    }
    demote_heavy();
  }

  // After every threshold decrease, heavy items whose certainty no longer
  // holds (1/w >= tau) rejoin the reservoir. Their stored priority is below
  // tau and conditionally Uniform(0, tau), so it is dropped like any other
  // reservoir priority.
  void demote_heavy() {
    for (std::size_t i = 0; i < heavy_.size();) {
      if (1.0 / heavy_[i].item.weight >= tau_) {
        reservoir_.push_back(std::move(heavy_[i].item));
        heavy_[i] = std::move(heavy_.back());
        heavy_.pop_back();
        ++counters_.heap_ops;
      } else {
        ++i;
      }
    }
  }

  void maybe_enter_steady() {
    if (!config_.allow_steady || steady_ || !config_.weight_bound) return;
    if (!heavy_.empty() || tau_ == kInfiniteThreshold) {
      heavy_free_streak_ = 0;
      return;
    }
    if (1.0 / *config_.weight_bound < tau_) return;
    if (++heavy_free_streak_ <= config_.steady_streak) return;
    steady_ = true;
  }

  void steady_add(const WeightedItem& item, double u) {
    double r = u / item.weight;
    if (1.0 / item.weight < tau_) {
      throw_error(errc::heavy_item_under_steady_state,
                  "weight " + std::to_string(item.weight) + " exceeds the registered bound");
    }
    if (r >= tau_) return;
    // One draw picks the evicted candidate among the k old items plus the new
    // one; landing on the new item means it never enters.
    std::size_t k = reservoir_.size();
    std::size_t victim = rng_.next_below(k + 1);
    if (victim < k) reservoir_[victim] = item;
    std::size_t candidates = k + 1;
    tau_ *= beta_factor(candidates);
    ++counters_.threshold_updates;
  }

  Config config_;
  Rng rng_;
  std::vector<WeightedItem> reservoir_;
  std::vector<HeavyEntry> heavy_;
  double tau_ = kInfiniteThreshold;
  bool steady_ = false;
  int heavy_free_streak_ = 0;
  SampleCounters counters_;
};

}  // namespace athres
