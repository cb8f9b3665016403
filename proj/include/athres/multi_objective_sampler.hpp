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
#include <map>
#include <string>
#include <vector>

#include "athres/rng.hpp"
#include "athres/sample.hpp"

namespace athres {

// Weight an objective assigns to an item.
struct ObjectiveWeight {
  enum class Source { item_weight, unit, payload_index };
  Source source = Source::item_weight;
  std::size_t payload_index = 0;

  double of(const WeightedItem& item) const {
    switch (source) {
      case Source::item_weight: return item.weight;
      case Source::unit: return 1.0;
      case Source::payload_index:
        if (payload_index >= item.value.size()) {
          throw_error(errc::invalid_weight, "objective weight payload index out of range");
        }
        return item.value[payload_index];
    }
    return 1.0;
  }
};

// Multi-objective sampler: one shared uniform U_i per item (from the keyed
// generator), one priority per objective R_i^(j) = F_ij^{-1}(U_i), and a
// fixed-size rule per objective. An item is retained while at least one
// objective wants it, so inclusion is a thresholding operation on U_i at
// max_j F_ij(tau^(j)). The resulting sample supports degree-1 estimators
// only.
class MultiObjectiveSampler {
 public:
  struct Objective {
    PriorityFamily family = PriorityFamily::uniform();
    ObjectiveWeight weight;
    int k = 1;
  };

  struct Config {
    std::vector<Objective> objectives;
    std::uint64_t seed = 0;
  };

  explicit MultiObjectiveSampler(const Config& config) : config_(config) {
    if (config.objectives.empty()) {
      throw_error(errc::invalid_sample_size, "need at least one objective");
    }
    for (const auto& objective : config.objectives) {
      if (objective.k < 1) throw_error(errc::invalid_sample_size, "objective k must be >= 1");
    }
    per_objective_.resize(config.objectives.size());
  }

  void add(const WeightedItem& item) {
    add_with_uniform(item, item_uniform(config_.seed, item.id));
  }

  void add_with_uniform(const WeightedItem& item, double u) {
    validate_weight(item.weight);
    std::uint64_t seq = counters_.items_seen++;
    auto [slot, fresh] = store_.try_emplace(item.id, Stored{item, u, 0});
    if (!fresh) throw_error(errc::duplicate_item, "duplicate item id '" + item.id + "'");
    for (std::size_t j = 0; j < config_.objectives.size(); ++j) {
      const Objective& objective = config_.objectives[j];
      double w = objective.weight.of(item);
      validate_weight(w);
      double r = inverse_cdf(objective.family, w, u);
      offer(j, Entry{r, seq, item.id});
    }
    if (slot->second.refs == 0) store_.erase(slot);
  }

  Sample finalize() const {
    Sample s;
    s.family = config_.objectives.front().family;
    s.seed = config_.seed;
    s.counters = counters_;
    s.threshold.degree_cap = 1;

    std::vector<double> taus(config_.objectives.size());
    for (std::size_t j = 0; j < config_.objectives.size(); ++j) {
      taus[j] = objective_tau(j);
      s.threshold.keyed[objective_key(j)] = taus[j];
    }
    for (const auto& [id, stored] : store_) {
      bool wanted = false;
      double union_f = 0.0;
      for (std::size_t j = 0; j < config_.objectives.size(); ++j) {
        double w = config_.objectives[j].weight.of(stored.item);
        double r = inverse_cdf(config_.objectives[j].family, w, stored.u);
        double f = cdf_at(config_.objectives[j].family, w, taus[j]);
        union_f = std::max(union_f, f);
        if (r < taus[j]) wanted = true;
      }
      if (!wanted) continue;  // only the threshold entry of some objective
      SampleItem si;
      si.item = stored.item;
      si.generator_u = stored.u;
      si.inclusion_cdf = union_f;
      s.items.push_back(std::move(si));
    }
    std::sort(s.items.begin(), s.items.end(),
              [](const SampleItem& a, const SampleItem& b) { return a.item.id < b.item.id; });
    return s;
  }

  // Plain single-threshold sample for one objective: items with R^(j) below
  // tau^(j), weighted by that objective's pseudo-inclusion probabilities.
  // Inherits the union sample's degree cap of 1.
  Sample objective_view(std::size_t j) const {
    const Objective& objective = config_.objectives.at(j);
    double tau = objective_tau(j);
    Sample s;
    s.family = objective.family;
    s.seed = config_.seed;
    s.counters = counters_;
    s.threshold.scalar = tau;
    s.threshold.degree_cap = 1;
    for (const auto& [id, stored] : store_) {
      double w = objective.weight.of(stored.item);
      double r = inverse_cdf(objective.family, w, stored.u);
      if (!(r < tau)) continue;
      SampleItem si;
      si.item = stored.item;
      si.priority = r;
      si.generator_u = stored.u;
      si.inclusion_cdf = cdf_at(objective.family, w, tau);
      s.items.push_back(std::move(si));
    }
    std::sort(s.items.begin(), s.items.end(),
              [](const SampleItem& a, const SampleItem& b) { return a.item.id < b.item.id; });
    return s;
  }

  std::size_t objectives() const { return config_.objectives.size(); }

  static std::string objective_key(std::size_t j) { return "obj" + std::to_string(j); }

 private:
  struct Stored {
    WeightedItem item;
    double u;
    int refs;
  };

  struct Entry {
    double priority;
    std::uint64_t seq;
    std::string id;
  };

  // Keeps the k+1 smallest priorities for the objective (sample plus
  // threshold entry), max-heap ordered with the arrival-index tie-break.
  struct ObjectiveState {
    std::vector<Entry> heap;
  };

  static bool entry_less(const Entry& a, const Entry& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.seq < b.seq;
  }
  static constexpr auto heap_less = [](const Entry& a, const Entry& b) {
    return entry_less(a, b);
  };

  void offer(std::size_t j, Entry e) {
    auto& heap = per_objective_[j].heap;
    std::size_t bound = static_cast<std::size_t>(config_.objectives[j].k) + 1;
    if (heap.size() < bound) {
      ++store_.at(e.id).refs;
      heap.push_back(std::move(e));
      std::push_heap(heap.begin(), heap.end(), heap_less);
      ++counters_.heap_ops;
      return;
    }
    if (!entry_less(e, heap.front())) return;
    std::pop_heap(heap.begin(), heap.end(), heap_less);
    release(heap.back().id);
    ++store_.at(e.id).refs;
    heap.back() = std::move(e);
    std::push_heap(heap.begin(), heap.end(), heap_less);
    ++counters_.heap_ops;
    ++counters_.threshold_updates;
  }

  void release(const std::string& id) {
    auto it = store_.find(id);
    if (it != store_.end() && --it->second.refs == 0) store_.erase(it);
  }

  double objective_tau(std::size_t j) const {
    const auto& heap = per_objective_[j].heap;
    std::size_t bound = static_cast<std::size_t>(config_.objectives[j].k) + 1;
    return heap.size() == bound ? heap.front().priority : kInfiniteThreshold;
  }

  Config config_;
  std::map<std::string, Stored> store_;
  std::vector<ObjectiveState> per_objective_;
  SampleCounters counters_;
};

}  // namespace athres
