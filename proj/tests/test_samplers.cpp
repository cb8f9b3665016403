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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "athres/estimators.hpp"
#include "athres/fast_sampler.hpp"
#include "athres/heap_sampler.hpp"
#include "athres/lazy_sampler.hpp"
#include "athres/multi_objective_sampler.hpp"
#include "athres/rng.hpp"
#include "athres/special_functions.hpp"
#include "athres/stratified_sampler.hpp"

using namespace athres;

namespace {

std::vector<WeightedItem> indexed_population(int n, bool weight_is_index) {
  std::vector<WeightedItem> population;
  for (int i = 0; i < n; ++i) {
    double w = weight_is_index ? static_cast<double>(i + 1) : 1.0;
    population.emplace_back(std::to_string(i), static_cast<double>(i + 1), w);
  }
  return population;
}

// Maps each size-k subset of {0..n-1} to a cell index.
struct SubsetIndexer {
  std::map<std::vector<int>, std::size_t> cells;

  SubsetIndexer(int n, int k) {
    std::vector<int> combo(k);
    std::function<void(int, int)> walk = [&](int start, int depth) {
      if (depth == k) {
        cells.emplace(combo, cells.size());
        return;
      }
      for (int i = start; i < n; ++i) {
        combo[depth] = i;
        walk(i + 1, depth + 1);
      }
    };
    walk(0, 0);
  }

  std::size_t index_of(const Sample& sample) const {
    std::vector<int> ids;
    ids.reserve(sample.items.size());
    for (const SampleItem& si : sample.items) ids.push_back(std::stoi(si.item.id));
    std::sort(ids.begin(), ids.end());
    auto it = cells.find(ids);
    REQUIRE(it != cells.end());
    return it->second;
  }
};

template <typename MakeSampler>
std::vector<double> retained_set_counts(const std::vector<WeightedItem>& population,
                                        const SubsetIndexer& indexer, MakeSampler make,
                                        std::uint64_t replicates, std::uint64_t seed) {
  std::vector<double> counts(indexer.cells.size(), 0.0);
  for (std::uint64_t r = 0; r < replicates; ++r) {
    auto sampler = make(replicate_seed(seed, r));
    for (const auto& item : population) sampler.add(item);
    counts[indexer.index_of(sampler.finalize())] += 1.0;
  }
  return counts;
}

}  // namespace

TEST_CASE("heap baseline keeps the k smallest and exposes the threshold item") {
  HeapSampler sampler({2, PriorityFamily::uniform(), 1, false});
  std::vector<double> priorities{0.1, 0.4, 0.2, 0.9};
  for (int i = 0; i < 4; ++i) {
    WeightedItem item(std::to_string(i), 1.0, 1.0);
    sampler.add_with_uniform(item, priorities[i]);
  }
  Sample s = sampler.finalize();
  CHECK(s.threshold.scalar == doctest::Approx(0.4));
  REQUIRE(s.items.size() == 2);
  std::set<std::string> ids;
  for (const auto& si : s.items) ids.insert(si.item.id);
  CHECK(ids == std::set<std::string>{"0", "2"});
  REQUIRE(s.source.has_value());
  CHECK(s.source->item.id == "1");
  CHECK(s.source->priority == doctest::Approx(0.4));
  CHECK(s.threshold.source_id == "1");
}

TEST_CASE("heap baseline retains everything while n <= k+1") {
  HeapSampler sampler({3, PriorityFamily::uniform(), 1, false});
  auto population = indexed_population(4, true);
  for (const auto& item : population) sampler.add(item);
  Sample s = sampler.finalize();
  CHECK(s.items.size() == 3);  // 4th item became the threshold record
  HeapSampler small({3, PriorityFamily::uniform(), 1, false});
  small.add(population[0]);
  small.add(population[1]);
  Sample s2 = small.finalize();
  CHECK(s2.items.size() == 2);
  CHECK(s2.threshold.scalar == kInfiniteThreshold);
  for (const auto& si : s2.items) CHECK(si.inclusion_cdf == 1.0);
}

TEST_CASE("heap threshold equals the offline fixed_k threshold on random streams") {
  Rng rng(77);
  for (int rep = 0; rep < 1000; ++rep) {
    int n = 3 + static_cast<int>(rng.next_below(12));
    int k = 1 + static_cast<int>(rng.next_below(4));
    HeapSampler sampler({k, PriorityFamily::uniform(), 1, false});
    std::vector<double> priorities;
    for (int i = 0; i < n; ++i) {
      double w = 0.5 + 3.0 * rng.next_unit_open();
      double u = rng.next_unit_open();
      WeightedItem item(std::to_string(i), 1.0, w);
      sampler.add_with_uniform(item, u);
      priorities.push_back(u / w);
    }
    CHECK(sampler.tau() == fixed_k_threshold(priorities, k));
  }
}

TEST_CASE("fast sampler bounds and heavy-item branch") {
  FastSampler::Config config;
  config.k = 1;
  config.seed = 5;
  FastSampler sampler(config);
  WeightedItem a("a", 1.0, 1.0), b("b", 1.0, 1.0);
  sampler.add(a);
  sampler.add(b);
  CHECK(sampler.retained() == 1);
  CHECK(sampler.tau() < kInfiniteThreshold);

  // An item with 1/w below the threshold is retained with certainty.
  FastSampler::Config config2;
  config2.k = 3;
  config2.seed = 9;
  FastSampler heavy_case(config2);
  for (int i = 0; i < 10; ++i) {
    WeightedItem item(std::to_string(i), 1.0, 1.0);
    heavy_case.add(item);
  }
  double tau = heavy_case.tau();
  REQUIRE(tau < 1.0);
  WeightedItem whale("whale", 1.0, 1000.0);
  REQUIRE(1.0 / whale.weight < tau);
  heavy_case.add(whale);
  Sample s = heavy_case.finalize();
  bool found = false;
  for (const auto& si : s.items) {
    if (si.item.id == "whale") {
      found = true;
      CHECK(si.inclusion_cdf == 1.0);
      CHECK(si.priority.has_value());
    }
  }
  CHECK(found);
}

TEST_CASE("fast sampler size bound holds after every update on randomized streams") {
  Rng rng(1234);
  for (std::uint64_t seedling = 0; seedling < 20; ++seedling) {
    FastSampler::Config config;
    config.k = 8;
    config.seed = seedling;
    FastSampler sampler(config);
    WeightedItem item;
    for (int i = 0; i < 2000; ++i) {
      item.id = std::to_string(i);
      item.weight = std::exp(1.5 * rng.next_gaussian());
      sampler.add(item);
      REQUIRE(sampler.retained() <= 8);
    }
  }
}

TEST_CASE("oracle equivalence: fast sampler vs heap baseline, all retained sets") {
  // n=6, weights 1..6, k=2: chi-square over the 15 possible retained sets at
  // the 0.001 level, 1e5 replicates per sampler. This also adjudicates the
  // Beta convention in the overflow threshold draw: the reservoir-size form
  // passes, the printed size-minus-one form shrinks the threshold too fast
  // and fails decisively.
  auto population = indexed_population(6, true);
  SubsetIndexer indexer(6, 2);
  const std::uint64_t reps = 100000;

  auto heap_counts = retained_set_counts(
      population, indexer,
      [](std::uint64_t seed) {
        return HeapSampler({2, PriorityFamily::uniform(), seed, false});
      },
      reps, 101);

  auto fast_counts = retained_set_counts(
      population, indexer,
      [](std::uint64_t seed) {
        FastSampler::Config config;
        config.k = 2;
        config.seed = seed;
        return FastSampler(config);
      },
      reps, 202);

  std::size_t df = 0;
  double stat = stats::chi2_two_sample(heap_counts, fast_counts, &df);
  double crit = stats::chi2_quantile(0.999, static_cast<double>(df));
  CHECK(stat < crit);

  auto printed_counts = retained_set_counts(
      population, indexer,
      [](std::uint64_t seed) {
        FastSampler::Config config;
        config.k = 2;
        config.seed = seed;
        config.beta = FastSampler::BetaConvention::reservoir_size_minus_one;
        return FastSampler(config);
      },
      reps, 303);
  double stat_printed = stats::chi2_two_sample(heap_counts, printed_counts, &df);
  CHECK(stat_printed > crit);
}

TEST_CASE("fast sampler inclusion frequencies match the heap baseline at k=3") {
  auto population = indexed_population(6, true);
  const std::uint64_t reps = 100000;
  std::vector<double> heap_freq(6, 0.0), fast_freq(6, 0.0);
  for (std::uint64_t r = 0; r < reps; ++r) {
    HeapSampler heap({3, PriorityFamily::uniform(), replicate_seed(11, r), false});
    FastSampler::Config config;
    config.k = 3;
    config.seed = replicate_seed(22, r);
    FastSampler fast(config);
    for (const auto& item : population) {
      heap.add(item);
      fast.add(item);
    }
    for (const auto& si : heap.finalize().items) heap_freq[std::stoul(si.item.id)] += 1.0;
    for (const auto& si : fast.finalize().items) fast_freq[std::stoul(si.item.id)] += 1.0;
  }
  for (int i = 0; i < 6; ++i) {
    double p1 = heap_freq[i] / reps;
    double p2 = fast_freq[i] / reps;
    double pooled = 0.5 * (p1 + p2);
    double se = std::sqrt(pooled * (1.0 - pooled) * 2.0 / reps);
    CHECK(std::fabs(p1 - p2) <= 4.0 * se);
  }
}

TEST_CASE("steady state: transition, frozen heap ops, rejection leaves state unchanged") {
  FastSampler::Config config;
  config.k = 2;
  config.seed = 31;
  config.weight_bound = 1.0;
  FastSampler sampler(config);
  WeightedItem item;
  item.weight = 1.0;
  for (int i = 0; i < 10; ++i) {
    item.id = std::to_string(i);
    sampler.add(item);
  }
  REQUIRE(sampler.steady_state());
  std::uint64_t frozen_heap_ops = sampler.counters().heap_ops;
  double tau_before = sampler.tau();
  Sample before = sampler.finalize();

  // A rejected arrival (priority above tau) changes nothing.
  item.id = "rejected";
  sampler.add_with_uniform(item, std::min(0.999, tau_before + 0.5 * (1.0 - tau_before)));
  CHECK(sampler.tau() == tau_before);
  CHECK(sampler.counters().heap_ops == frozen_heap_ops);
  Sample after = sampler.finalize();
  REQUIRE(after.items.size() == before.items.size());
  for (std::size_t i = 0; i < after.items.size(); ++i) {
    CHECK(after.items[i].item.id == before.items[i].item.id);
  }

  // Long bounded stream: heavy-set operations stay frozen in steady state.
  for (int i = 0; i < 5000; ++i) {
    item.id = std::to_string(10 + i);
    sampler.add(item);
  }
  CHECK(sampler.counters().heap_ops == frozen_heap_ops);

  // A weight above the registered bound cannot take the steady-state path.
  item.id = "too-heavy";
  item.weight = 1e6;
  CHECK_THROWS_AS(sampler.add(item), error);
}

TEST_CASE("oracle equivalence holds across the steady-state transition") {
  // Unit weights with bound 1: the sampler enters steady state right after
  // saturation, so most of the stream runs through the steady-state path.
  auto population = indexed_population(12, false);
  SubsetIndexer indexer(12, 2);
  const std::uint64_t reps = 100000;

  auto heap_counts = retained_set_counts(
      population, indexer,
      [](std::uint64_t seed) {
        return HeapSampler({2, PriorityFamily::uniform(), seed, false});
      },
      reps, 404);
  auto fast_counts = retained_set_counts(
      population, indexer,
      [](std::uint64_t seed) {
        FastSampler::Config config;
        config.k = 2;
        config.seed = seed;
        config.weight_bound = 1.0;
        return FastSampler(config);
      },
      reps, 505);

  std::size_t df = 0;
  double stat = stats::chi2_two_sample(heap_counts, fast_counts, &df);
  CHECK(stat < stats::chi2_quantile(0.999, static_cast<double>(df)));
}

TEST_CASE("lazy sampler with the Wegman rule: capacity, brackets, offline agreement") {
  LazySampler::Config config;
  config.capacity = 4;
  config.rule = parse_rule("wegman:4");
  config.seed = 71;
  LazySampler sampler(config);
  Rng rng(71);

  std::vector<double> all_priorities;
  WeightedItem item;
  item.weight = 1.0;
  for (int i = 0; i < 20; ++i) {
    item.id = std::to_string(i);
    double u = rng.next_unit_open();
    all_priorities.push_back(u);
    sampler.add_with_uniform(item, u);
    CHECK(sampler.retained() <= 4);
    double tau = sampler.tau();
    if (tau < 1.0) {
      int exp;
      CHECK(std::frexp(tau, &exp) == 0.5);  // an exact power of two
    }
  }
  // Streaming application of the halving rule agrees with the offline one.
  CHECK(sampler.tau() == apply_rule_offline(*config.rule, all_priorities));

  Sample s = sampler.finalize();
  for (const auto& si : s.items) {
    REQUIRE(si.priority.has_value());
    CHECK(*si.priority < s.threshold.scalar);
  }
}

TEST_CASE("lazy sampler rejects rules that raise the threshold") {
  struct RaisingRule final : ThresholdRule {
    std::string name() const override { return "raising"; }
    double initial_tau() const override { return 0.5; }
    double update(std::span<const double>, const RuleContext& ctx) const override {
      return ctx.current_tau * 2.0;
    }
  };
  LazySampler::Config config;
  config.capacity = 2;
  config.rule = std::make_shared<RaisingRule>();
  config.seed = 3;
  LazySampler sampler(config);
  WeightedItem item;
  item.weight = 1.0;
  bool threw = false;
  try {
    for (int i = 0; i < 50; ++i) {
      item.id = std::to_string(i);
      sampler.add(item);
    }
  } catch (const error& e) {
    threw = e.code() == errc::threshold_increased;
  }
  CHECK(threw);
}

TEST_CASE("lazy sampler books every arrival as retained or rejected") {
  LazySampler::Config config;
  config.capacity = 3;
  config.rule = parse_rule("fixed_k:3");
  config.seed = 15;
  LazySampler sampler(config);
  WeightedItem item;
  item.weight = 1.0;
  int n = 40;
  for (int i = 0; i < n; ++i) {
    item.id = std::to_string(i);
    item.value = {static_cast<double>(i)};
    sampler.add(item);
  }
  CHECK(sampler.rejected_stats().n + sampler.retained() == static_cast<std::uint64_t>(n));
  Sample s = sampler.finalize();
  CHECK(s.threshold.rejected.n == sampler.rejected_stats().n);
}

TEST_CASE("variance-adapted lazy sampling targets the adaptive size") {
  LazySampler::Config config;
  config.capacity = 0;  // rule-driven only
  config.rule = parse_rule("var_adapt:0.05");
  config.seed = 99;
  LazySampler sampler(config);
  Rng rng(99);
  WeightedItem item;
  item.weight = 1.0;
  double prev_tau = sampler.tau();
  for (int i = 0; i < 20000; ++i) {
    item.id = std::to_string(i);
    item.value = {10.0 + rng.next_gaussian()};
    sampler.add(item);
    CHECK(sampler.tau() <= prev_tau);
    prev_tau = sampler.tau();
  }
  // sigma^2/(eps^2 mu^2) = 1/(0.0025 * 100) = 4 is floored at k_min = 30, so
  // the threshold tracks 30/(n+1).
  double expected_tau = 30.0 / 20001.0;
  CHECK(sampler.tau() == doctest::Approx(expected_tau).epsilon(0.35));
  CHECK(sampler.retained() < 120);
}

TEST_CASE("stratified sampler: budget respected on every step, eviction sets the threshold") {
  Rng rng(8);
  const char* labels[] = {"a", "b", "c", "d", "e"};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    StratifiedSampler sampler({25, seed, false});
    WeightedItem item;
    for (int i = 0; i < 4000; ++i) {
      item.id = std::to_string(i);
      item.weight = std::exp(0.5 * rng.next_gaussian());
      item.stratum = labels[rng.next_below(5)];
      sampler.add(item);
      REQUIRE(sampler.retained() <= 25);
    }
    Sample s = sampler.finalize();
    CHECK(s.items.size() <= 25);
    for (const auto& si : s.items) {
      REQUIRE(si.priority.has_value());
      CHECK(*si.priority < s.threshold.keyed.at(*si.item.stratum));
    }
  }
}

TEST_CASE("stratified sampler with one stratum matches the heap baseline distribution") {
  auto population = indexed_population(6, true);
  for (auto& item : population) item.stratum = "only";
  SubsetIndexer indexer(6, 2);
  const std::uint64_t reps = 100000;

  auto heap_counts = retained_set_counts(
      population, indexer,
      [](std::uint64_t seed) {
        return HeapSampler({2, PriorityFamily::uniform(), seed, false});
      },
      reps, 606);
  auto strat_counts = retained_set_counts(
      population, indexer,
      [](std::uint64_t seed) { return StratifiedSampler({2, seed, false}); }, reps, 707);

  std::size_t df = 0;
  double stat = stats::chi2_two_sample(heap_counts, strat_counts, &df);
  CHECK(stat < stats::chi2_quantile(0.999, static_cast<double>(df)));
}

TEST_CASE("stratified allocation tracks arrival proportions") {
  // Arrival ratio 3:1 with budget 40 should allocate close to (30, 10).
  const std::uint64_t reps = 60;
  double mean_a = 0.0, mean_b = 0.0;
  for (std::uint64_t rep = 0; rep < reps; ++rep) {
    StratifiedSampler sampler({40, replicate_seed(55, rep), false});
    Rng rng(replicate_seed(56, rep));
    WeightedItem item;
    item.weight = 1.0;
    for (int i = 0; i < 10000; ++i) {
      item.id = std::to_string(i);
      item.stratum = rng.next_below(4) < 3 ? "a" : "b";
      sampler.add(item);
    }
    Sample s = sampler.finalize();
    for (const auto& si : s.items) {
      if (*si.item.stratum == "a") {
        mean_a += 1.0;
      } else {
        mean_b += 1.0;
      }
    }
  }
  mean_a /= static_cast<double>(reps);
  mean_b /= static_cast<double>(reps);
  CHECK(mean_a == doctest::Approx(30.0).epsilon(0.10));
  CHECK(mean_b == doctest::Approx(10.0).epsilon(0.10));
}

TEST_CASE("stratified sampler errors when the budget cannot hold the live strata") {
  StratifiedSampler sampler({2, 1, false});
  WeightedItem item;
  item.weight = 1.0;
  item.id = "x1";
  item.stratum = "s1";
  sampler.add(item);
  item.id = "x2";
  item.stratum = "s2";
  sampler.add(item);
  item.id = "x3";
  item.stratum = "s3";
  CHECK_THROWS_AS(sampler.add(item), error);
}

TEST_CASE("multi-objective sampler with one objective equals plain fixed-size sampling") {
  auto population = indexed_population(9, true);
  MultiObjectiveSampler::Config config;
  config.seed = 42;
  config.objectives.push_back({PriorityFamily::uniform(), {}, 3});
  MultiObjectiveSampler multi(config);
  HeapSampler heap({3, PriorityFamily::uniform(), 42, true});
  for (const auto& item : population) {
    multi.add(item);
    heap.add(item);
  }
  Sample union_sample = multi.finalize();
  Sample heap_sample = heap.finalize();
  REQUIRE(union_sample.items.size() == heap_sample.items.size());
  std::set<std::string> a, b;
  for (const auto& si : union_sample.items) a.insert(si.item.id);
  for (const auto& si : heap_sample.items) b.insert(si.item.id);
  CHECK(a == b);
  CHECK(union_sample.threshold.keyed.at("obj0") == doctest::Approx(heap_sample.threshold.scalar));
  CHECK(union_sample.degree_cap() == 1);
}

TEST_CASE("multi-objective union retains an item any objective wants") {
  MultiObjectiveSampler::Config config;
  config.seed = 7;
  config.objectives.push_back({PriorityFamily::uniform(), {}, 2});
  MultiObjectiveSampler::Objective unit;
  unit.weight.source = ObjectiveWeight::Source::unit;
  unit.k = 2;
  config.objectives.push_back(unit);
  MultiObjectiveSampler sampler(config);
  Rng rng(19);
  WeightedItem item;
  for (int i = 0; i < 40; ++i) {
    item.id = std::to_string(i);
    item.weight = i < 20 ? 10.0 : 0.1;
    sampler.add_with_uniform(item, rng.next_unit_open());
  }
  // A tiny shared uniform is below every objective's inclusion band.
  item.id = "tiny";
  item.weight = 5.0;
  sampler.add_with_uniform(item, 1e-9);
  Sample s = sampler.finalize();
  bool present = false;
  for (const auto& si : s.items) present = present || si.item.id == "tiny";
  CHECK(present);

  // Views are consistent with the union.
  Sample v0 = sampler.objective_view(0);
  Sample v1 = sampler.objective_view(1);
  std::set<std::string> union_ids;
  for (const auto& si : s.items) union_ids.insert(si.item.id);
  std::set<std::string> view_union;
  for (const auto& si : v0.items) view_union.insert(si.item.id);
  for (const auto& si : v1.items) view_union.insert(si.item.id);
  CHECK(union_ids == view_union);
  CHECK(v0.degree_cap() == 1);

  // Duplicate ids break the shared-uniform assumption.
  item.id = "tiny";
  CHECK_THROWS_AS(sampler.add(item), error);
}

TEST_CASE("finalized samples: stored inclusion probabilities recompute exactly") {
  Rng rng(314);
  WeightedItem item;

  HeapSampler heap({3, PriorityFamily::exponential(), 1, false});
  LazySampler::Config lc;
  lc.capacity = 3;
  lc.rule = parse_rule("fixed_k:3");
  lc.seed = 2;
  LazySampler lazy(lc);
  StratifiedSampler strat({5, 3, false});
  for (int i = 0; i < 50; ++i) {
    item.id = std::to_string(i);
    item.weight = 0.5 + 2.0 * rng.next_unit_open();
    item.stratum = i % 2 ? "a" : "b";
    heap.add(item);
    lazy.add(item);
    strat.add(item);
  }
  for (const Sample& s : {heap.finalize(), lazy.finalize(), strat.finalize()}) {
    REQUIRE(!s.items.empty());
    for (const auto& si : s.items) {
      double tau = s.threshold.tau_for(s.threshold.is_keyed() ? si.item.stratum : std::nullopt);
      CHECK(si.inclusion_cdf == cdf_at(s.family, si.item.weight, tau));
      if (si.priority) CHECK(*si.priority < tau);
    }
  }
}

TEST_CASE("fast sampler HT stays unbiased under forward-decay style growing weights") {
  // Weights grow exponentially with arrival index, the regime the streaming
  // regression uses; heavy items appear and retire as tau shrinks.
  const int n = 24;
  std::vector<WeightedItem> population;
  double truth = 0.0;
  for (int i = 0; i < n; ++i) {
    double w = std::exp(0.25 * i);
    double x = 1.0 + (i % 5);
    population.emplace_back(std::to_string(i), x, w);
    truth += x;
  }
  const std::uint64_t reps = 40000;
  Accumulator acc;
  for (std::uint64_t r = 0; r < reps; ++r) {
    FastSampler::Config config;
    config.k = 6;
    config.seed = replicate_seed(808, r);
    FastSampler sampler(config);
    for (const auto& item : population) sampler.add(item);
    acc.push(subset_sum_ht(sampler.finalize()).scalar());
  }
  CHECK(std::fabs(acc.z_against(truth)) <= 4.0);
}
