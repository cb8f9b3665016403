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

namespace athres {

// Literal priority sampler: a max-heap keeps the k+1 smallest priorities; the
// largest retained one is the threshold, the other k are the sample. This is
// the oracle baseline the fast reservoir algorithms are validated against,
// and the workhorse for small Monte-Carlo studies.
class HeapSampler {
 public:
  struct Config {
    int k = 1;
    PriorityFamily family = PriorityFamily::uniform();
    std::uint64_t seed = 0;
    // Reproducible mode: U_i is derived from (seed, id) instead of the
    // sequential stream, so independently processed partitions agree.
    bool keyed_uniforms = false;
  };

  explicit HeapSampler(const Config& config) : config_(config), rng_(config.seed) {
    if (config.k < 1) throw_error(errc::invalid_sample_size, "sample size must be >= 1");
    heap_.reserve(static_cast<std::size_t>(config.k) + 1);
  }

  void add(const WeightedItem& item) {
    double u = config_.keyed_uniforms ? item_uniform(config_.seed, item.id) : rng_.next_unit_open();
    add_with_uniform(item, u);
  }

  void add_with_uniform(const WeightedItem& item, double u) {
    validate_weight(item.weight);
    double r = inverse_cdf(config_.family, item.weight, u);
    std::uint64_t seq = counters_.items_seen++;
    if (heap_.size() <= static_cast<std::size_t>(config_.k)) {
      heap_.push_back(Entry{r, seq, item, u});
      std::push_heap(heap_.begin(), heap_.end(), less_);
      ++counters_.heap_ops;
      return;
    }
    const Entry& top = heap_.front();
    if (r < top.priority || (r == top.priority && seq < top.seq)) {
      std::pop_heap(heap_.begin(), heap_.end(), less_);
      heap_.back() = Entry{r, seq, item, u};
      std::push_heap(heap_.begin(), heap_.end(), less_);
      ++counters_.heap_ops;
      ++counters_.threshold_updates;
    }
  }

  // Records items known to lie above the threshold without copying them;
  // lets bulk drivers pre-test against tau() on the fast path.
  void skip_rejected(std::uint64_t count = 1) { counters_.items_seen += count; }

  double tau() const {
    return heap_.size() > static_cast<std::size_t>(config_.k) ? heap_.front().priority
                                                              : kInfiniteThreshold;
  }

  Sample finalize() const {
    Sample s;
    s.family = config_.family;
    s.seed = config_.seed;
    s.counters = counters_;
    s.threshold.scalar = tau();
    bool saturated = heap_.size() > static_cast<std::size_t>(config_.k);
    s.items.reserve(heap_.size());
    for (const Entry& e : heap_) {
      if (saturated && !less_(e, heap_.front())) continue;  // the threshold item
      SampleItem si;
      si.item = e.item;
      si.priority = e.priority;
      si.generator_u = e.u;
      si.inclusion_cdf = cdf_at(config_.family, e.item.weight, s.threshold.scalar);
      s.items.push_back(std::move(si));
    }
    if (saturated) {
      const Entry& top = heap_.front();
      s.source = ThresholdSource{top.item, top.priority};
      s.threshold.source_id = top.item.id;
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

  // Ties between equal float priorities break on arrival index, which makes
  // the order statistics deterministic.
  static bool less_entry(const Entry& a, const Entry& b) {
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.seq < b.seq;
  }
  static constexpr auto less_ = [](const Entry& a, const Entry& b) { return less_entry(a, b); };

  Config config_;
  Rng rng_;
  std::vector<Entry> heap_;
  SampleCounters counters_;
};

}  // namespace athres
