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

#include "athres/factorization_check.hpp"

#include <algorithm>
#include <cmath>

#include "athres/accumulators.hpp"
#include "athres/rng.hpp"

namespace athres {

namespace {

constexpr int kMaxPopulation = 12;

std::vector<std::vector<int>> enumerate_lambdas(int n, int v) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  // Depth-first over index subsets up to size v, smallest indices first.
  std::function<void(int)> walk = [&](int start) {
    if (!current.empty()) out.push_back(current);
    if (static_cast<int>(current.size()) == v) return;
    for (int i = start; i < n; ++i) {
      current.push_back(i);
      walk(i + 1);
      current.pop_back();
    }
  };
  walk(0);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

FactorizationReport accumulate(const std::vector<std::vector<int>>& lambdas,
                               const std::function<void(std::uint64_t, std::vector<double>&)>& ratios_for_trial,
                               int n, int v, std::uint64_t trials, std::uint64_t seed,
                               const std::string& subject) {
  std::vector<Accumulator> acc(lambdas.size());
  std::vector<double> ratio(n);
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    ratios_for_trial(replicate_seed(seed, trial), ratio);
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      double product = 1.0;
      for (int idx : lambdas[li]) {
        product *= ratio[idx];
        if (product == 0.0) break;
      }
      acc[li].push(product);
    }
  }

  FactorizationReport report;
  report.subject = subject;
  report.v = v;
  report.trials = trials;
  report.rows.reserve(lambdas.size());
  for (std::size_t li = 0; li < lambdas.size(); ++li) {
    FactorizationReport::LambdaRow row;
    row.indices = lambdas[li];
    row.mean = acc[li].mean;
    row.se = acc[li].se_of_mean();
    row.z = acc[li].z_against(1.0);
    report.max_abs_z = std::max(report.max_abs_z, std::fabs(row.z));
    report.rows.push_back(std::move(row));
  }
  report.pass = report.max_abs_z <= 4.0;
  return report;
}

}  // namespace

FactorizationReport check_factorization(const ThresholdRule& rule, const PriorityFamily& family,
                                        std::span<const double> weights, int v,
                                        std::uint64_t trials, std::uint64_t seed) {
  int n = static_cast<int>(weights.size());
  if (n < 1 || n > kMaxPopulation) {
    throw_error(errc::invalid_sample_size, "factorization check is a small-instance tool (n <= 12)");
  }
  if (v < 1 || v > n) throw_error(errc::invalid_sample_size, "need 1 <= v <= n");
  auto lambdas = enumerate_lambdas(n, v);

  std::vector<double> priorities(n), sorted(n);
  auto trial_fn = [&](std::uint64_t trial_seed, std::vector<double>& ratio) {
    Rng rng(trial_seed);
    for (int i = 0; i < n; ++i) {
      priorities[i] = inverse_cdf(family, weights[i], rng.next_unit_open());
    }
    sorted = priorities;
    std::sort(sorted.begin(), sorted.end());
    RuleContext ctx;
    ctx.items_seen = static_cast<std::uint64_t>(n);
    Accumulator none;
    ctx.rejected = &none;
    ctx.current_tau = rule.initial_tau();
    double tau = rule.update(sorted, ctx);
    for (int i = 0; i < n; ++i) {
      if (priorities[i] < tau) {
        ratio[i] = 1.0 / cdf_at(family, weights[i], tau);
      } else {
        ratio[i] = 0.0;
      }
    }
  };
  return accumulate(lambdas, trial_fn, n, v, trials, seed, rule.name());
}

FactorizationReport check_factorization_sampler(
    const std::function<Sample(std::uint64_t)>& run, int population_size, int v,
    std::uint64_t trials, std::uint64_t seed, const std::string& subject) {
  if (population_size < 1 || population_size > kMaxPopulation) {
    throw_error(errc::invalid_sample_size, "factorization check is a small-instance tool (n <= 12)");
  }
  if (v < 1 || v > population_size) throw_error(errc::invalid_sample_size, "need 1 <= v <= n");
  auto lambdas = enumerate_lambdas(population_size, v);

  auto trial_fn = [&](std::uint64_t trial_seed, std::vector<double>& ratio) {
    std::fill(ratio.begin(), ratio.end(), 0.0);
    Sample sample = run(trial_seed);
    for (const SampleItem& si : sample.items) {
      int idx = std::stoi(si.item.id);
      ratio.at(idx) = 1.0 / si.inclusion_cdf;
    }
  };
  return accumulate(lambdas, trial_fn, population_size, v, trials, seed, subject);
}

}  // namespace athres
