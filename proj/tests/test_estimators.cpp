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
#include <vector>

#include "athres/estimators.hpp"
#include "athres/heap_sampler.hpp"
#include "athres/m_estimation.hpp"
#include "athres/rng.hpp"
#include "athres/u_statistics.hpp"

using namespace athres;

namespace {

Sample census_sample(const std::vector<double>& values, double weight = 1.0) {
  Sample s;
  s.threshold.scalar = kInfiniteThreshold;
  for (std::size_t i = 0; i < values.size(); ++i) {
    SampleItem si;
    si.item = WeightedItem(std::to_string(i), values[i], weight);
    si.inclusion_cdf = 1.0;
    s.items.push_back(std::move(si));
  }
  return s;
}

std::vector<WeightedItem> linear_population(int n) {
  std::vector<WeightedItem> population;
  for (int i = 1; i <= n; ++i) {
    population.emplace_back(std::to_string(i - 1), static_cast<double>(i),
                            static_cast<double>(i));
  }
  return population;
}

Sample draw_fixed_k(const std::vector<WeightedItem>& population, int k, std::uint64_t seed) {
  HeapSampler sampler({k, PriorityFamily::uniform(), seed, false});
  for (const auto& item : population) sampler.add(item);
  return sampler.finalize();
}

double ht(const Sample& s) { return subset_sum_ht(s).scalar(); }

}  // namespace

TEST_CASE("subset sum HT: census, single item, and corrupt input") {
  Sample census = census_sample({1, 2, 3});
  CHECK(subset_sum_ht(census).scalar() == 6.0);

  Sample single;
  single.threshold.scalar = 0.5;
  SampleItem si;
  si.item = WeightedItem("a", 5.0, 1.0);
  si.inclusion_cdf = 0.5;
  single.items.push_back(si);
  CHECK(subset_sum_ht(single).scalar() == doctest::Approx(10.0));

  single.items[0].inclusion_cdf = 0.0;
  CHECK_THROWS_AS(subset_sum_ht(single), error);
}

TEST_CASE("subset sum HT is unbiased under fixed-size priority sampling") {
  auto population = linear_population(6);  // truth 21
  Accumulator acc;
  for (std::uint64_t r = 0; r < 100000; ++r) {
    acc.push(ht(draw_fixed_k(population, 3, replicate_seed(1, r))));
  }
  CHECK(std::fabs(acc.z_against(21.0)) <= 4.0);
}

TEST_CASE("subset sum variance estimator: exact cases and the Monte-Carlo identity") {
  Sample census = census_sample({1, 2, 3});
  CHECK(subset_sum_variance(census).scalar() == 0.0);

  Sample single;
  single.threshold.scalar = 0.5;
  SampleItem si;
  si.item = WeightedItem("a", 1.0, 1.0);
  si.inclusion_cdf = 0.5;
  single.items.push_back(si);
  single.items.push_back(si);  // degree guard needs |J| >= 2
  single.items[1].item.id = "b";
  single.items[1].item.value = {0.0};
  CHECK(subset_sum_variance(single).scalar() == doctest::Approx(2.0));

  // E[Var-hat] = Var(S-hat): with the truth known, G = Var-hat - (S-hat -
  // truth)^2 has mean zero, giving one clean z-test.
  auto population = linear_population(8);
  double truth = 36.0;
  Accumulator g;
  for (std::uint64_t r = 0; r < 100000; ++r) {
    Sample s = draw_fixed_k(population, 4, replicate_seed(2, r));
    double est = ht(s);
    double var_est = subset_sum_variance(s).scalar();
    g.push(var_est - (est - truth) * (est - truth));
  }
  CHECK(std::fabs(g.z_against(0.0)) <= 4.0);
}

TEST_CASE("degree guard refuses estimators beyond the sample's cap") {
  Sample capped = census_sample({1, 2, 3});
  capped.threshold.degree_cap = 1;  // e.g. a max-merged or multi-objective sample
  CHECK_THROWS_AS(subset_sum_variance(capped), error);
  CHECK_THROWS_AS(u_statistic_degree2(capped, variance_kernel, 3), error);
  CHECK(subset_sum_ht(capped).scalar() == 6.0);

  // Strongly compatible but |J| = 1: pairwise estimators are not computable.
  Sample tiny;
  tiny.threshold.scalar = 0.5;
  SampleItem si;
  si.item = WeightedItem("a", 1.0, 1.0);
  si.inclusion_cdf = 0.5;
  tiny.items.push_back(si);
  CHECK_THROWS_AS(subset_sum_variance(tiny), error);
}

TEST_CASE("threshold inclusion: uniform candidate weights, k=0 edge, missing source") {
  // Equal unit weights with tau < 1: f_j(tau)/F_j(tau) = 1/tau for every
  // candidate, so the averaging weights are uniform over the k+1 items.
  Sample s;
  s.threshold.scalar = 0.4;
  s.family = PriorityFamily::uniform();
  for (int i = 0; i < 3; ++i) {
    SampleItem si;
    si.item = WeightedItem(std::to_string(i), static_cast<double>(i + 1), 1.0);
    si.inclusion_cdf = 0.4;
    s.items.push_back(si);
  }
  s.source = ThresholdSource{WeightedItem("src", 9.0, 1.0), 0.4};
  s.threshold.source_id = "src";

  // Averaging over leave-one-out subsets of {1,2,3,9}/0.4 with uniform
  // weights: mean of (sum - x_j)/0.4 = (4*15 - 15)/(4*0.4) = 28.125.
  double expected = (4.0 * 15.0 - 15.0) / (4.0 * 0.4);
  Estimate e = threshold_inclusion_estimate(s, ht);
  CHECK(e.scalar() == doctest::Approx(expected));

  Sample only_source = s;
  only_source.items.clear();
  CHECK(threshold_inclusion_estimate(only_source, ht).scalar() == doctest::Approx(0.0));

  Sample no_source = s;
  no_source.source.reset();
  CHECK_THROWS_AS(threshold_inclusion_estimate(no_source, ht), error);
}

TEST_CASE("threshold inclusion is unbiased and reduces variance on matched draws") {
  // Payloads decoupled from weights; with x proportional to w the HT sum is
  // constant given tau and the averaging has nothing to improve.
  std::vector<WeightedItem> population;
  double truth = 0.0;
  for (int i = 1; i <= 8; ++i) {
    double x = (i % 3 + 1) * 2.0;
    population.emplace_back(std::to_string(i - 1), x, static_cast<double>(i));
    truth += x;
  }
  Accumulator plain, augmented;
  for (std::uint64_t r = 0; r < 100000; ++r) {
    Sample s = draw_fixed_k(population, 3, replicate_seed(3, r));
    plain.push(ht(s));
    augmented.push(threshold_inclusion_estimate(s, ht).scalar());
  }
  CHECK(std::fabs(plain.z_against(truth)) <= 4.0);
  CHECK(std::fabs(augmented.z_against(truth)) <= 4.0);
  // Strict improvement, well beyond replicate noise.
  CHECK(augmented.variance() < 0.95 * plain.variance());
}

TEST_CASE("weighted cdf: normalization, census, exactness, monotonicity") {
  Sample census = census_sample({1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(weighted_cdf(census, 100.0, AlphaMode::plug_in) == 1.0);
  CHECK(weighted_cdf(census, 4.5, AlphaMode::plug_in) == doctest::Approx(4.0 / 9.0));
  CHECK_THROWS_AS(weighted_cdf(census, 1.0, AlphaMode::exact), error);

  // Unbiasedness of the exact-alpha estimator at a fixed evaluation point.
  std::vector<WeightedItem> population;
  Rng rng(4);
  double alpha = 0.0;
  for (int i = 0; i < 20; ++i) {
    double w = 0.5 + 2.0 * rng.next_unit_open();
    population.emplace_back(std::to_string(i), static_cast<double>(i), w);
    alpha += w;
  }
  double x_eval = 9.5;
  double truth = 0.0;
  for (const auto& item : population) {
    if (item.x() <= x_eval) truth += item.weight;
  }
  truth /= alpha;
  Accumulator acc;
  for (std::uint64_t r = 0; r < 60000; ++r) {
    Sample s = draw_fixed_k(population, 8, replicate_seed(5, r));
    acc.push(weighted_cdf(s, x_eval, AlphaMode::exact, alpha));
  }
  CHECK(std::fabs(acc.z_against(truth)) <= 4.0);

  // Plug-in cdf is monotone with range [0,1]; exact-alpha cdf is monotone.
  Sample s = draw_fixed_k(population, 8, 99);
  double prev_plug = -1.0, prev_exact = -1.0;
  for (double x = -1.0; x <= 21.0; x += 0.5) {
    double plug = weighted_cdf(s, x, AlphaMode::plug_in);
    double exact = weighted_cdf(s, x, AlphaMode::exact, alpha);
    CHECK(plug >= prev_plug);
    CHECK(exact >= prev_exact);
    CHECK(plug >= 0.0);
    CHECK(plug <= 1.0);
    prev_plug = plug;
    prev_exact = exact;
  }
  CHECK(prev_plug == 1.0);
}

TEST_CASE("weighted quantile: census, extremes, and the band test against brute force") {
  Sample census = census_sample({1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(weighted_quantile(census, 0.5) == 5.0);
  CHECK(weighted_quantile(census, 1e-9) == 1.0);

  Sample empty;
  CHECK_THROWS_AS(weighted_quantile(empty, 0.5), error);
  CHECK_THROWS_AS(weighted_quantile(census, 0.0), error);

  // Skewed weights: the sampled quantile lands around the brute-force
  // weighted quantile of the full population.
  std::vector<WeightedItem> population;
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    double w = std::exp(1.2 * rng.next_gaussian());
    population.emplace_back(std::to_string(i), rng.next_gaussian() * 3.0, w);
  }
  // Brute-force true weighted median.
  std::vector<std::pair<double, double>> sorted_pop;
  double total = 0.0;
  for (const auto& item : population) {
    sorted_pop.emplace_back(item.x(), item.weight);
    total += item.weight;
  }
  std::sort(sorted_pop.begin(), sorted_pop.end());
  double cum = 0.0, truth = sorted_pop.back().first;
  for (const auto& [x, w] : sorted_pop) {
    cum += w;
    if (cum >= 0.5 * total) {
      truth = x;
      break;
    }
  }
  std::vector<double> estimates;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    estimates.push_back(weighted_quantile(draw_fixed_k(population, 20, replicate_seed(7, r)), 0.5));
  }
  std::sort(estimates.begin(), estimates.end());
  double lo = estimates[static_cast<std::size_t>(0.025 * estimates.size())];
  double hi = estimates[static_cast<std::size_t>(0.975 * estimates.size())];
  CHECK(lo <= truth);
  CHECK(truth <= hi);
}

TEST_CASE("weighted loss fit: closed forms for squared loss") {
  Sample census = census_sample({1, 2, 3, 4});
  Estimate plain = weighted_loss_fit(census, SquaredLoss{});
  CHECK(plain.scalar() == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(plain.converged);

  // Weighted sample: minimizer is sum(c x)/sum(c) with c = w/F.
  Sample s;
  s.threshold.scalar = 0.5;
  double expected_num = 0.0, expected_den = 0.0;
  for (int i = 0; i < 4; ++i) {
    SampleItem si;
    double w = 1.0 + i;
    si.item = WeightedItem(std::to_string(i), static_cast<double>(10 + i), w);
    si.inclusion_cdf = std::min(1.0, w * 0.2);
    s.items.push_back(si);
    expected_num += (w / si.inclusion_cdf) * (10 + i);
    expected_den += w / si.inclusion_cdf;
  }
  Estimate weighted = weighted_loss_fit(s, SquaredLoss{});
  CHECK(weighted.scalar() == doctest::Approx(expected_num / expected_den).epsilon(1e-6));

  // Sandwich variance is symmetric PSD.
  REQUIRE(weighted.variance.has_value());
  CHECK((*weighted.variance)[0] >= 0.0);
}

TEST_CASE("weighted logistic fit on a subsample tracks the full-data fit") {
  // Fixed coefficients, n=1e4 population, k=1e3 priority subsample with
  // size-biased weights; the subsampled fit should sit within 3 estimated
  // standard errors of the full-data fit.
  const int n = 10000;
  Rng rng(8);
  std::vector<WeightedItem> population;
  linalg::Vec beta{1.2, -0.7};
  for (int i = 0; i < n; ++i) {
    double x1 = rng.next_gaussian();
    double x2 = rng.next_gaussian();
    double p = 1.0 / (1.0 + std::exp(-(beta[0] * x1 + beta[1] * x2)));
    double y = rng.next_unit_open() < p ? 1.0 : 0.0;
    WeightedItem item(std::to_string(i), std::vector<double>{y, x1, x2},
                      0.5 + rng.next_unit_open());
    population.push_back(std::move(item));
  }

  // Full-data fit: weights w_i, all inclusion probabilities 1.
  Sample full;
  full.threshold.scalar = kInfiniteThreshold;
  for (const auto& item : population) {
    SampleItem si;
    si.item = item;
    si.inclusion_cdf = 1.0;
    full.items.push_back(std::move(si));
  }
  Estimate full_fit = weighted_loss_fit(full, LogisticLoss{2});
  REQUIRE(full_fit.converged);

  Sample sub = draw_fixed_k(population, 1000, 21);
  Estimate sub_fit = weighted_loss_fit(sub, LogisticLoss{2});
  REQUIRE(sub_fit.converged);
  REQUIRE(sub_fit.variance.has_value());
  for (int j = 0; j < 2; ++j) {
    double se = std::sqrt((*sub_fit.variance)[j * 2 + j]);
    CHECK(std::fabs(sub_fit.value[j] - full_fit.value[j]) <= 3.0 * se);
  }

  // Covariance matrices from the sandwich are symmetric PSD.
  linalg::Mat cov(2);
  cov.a = *sub_fit.variance;
  CHECK(linalg::is_symmetric_psd(cov, 1e-9));
}

TEST_CASE("non-convergent fits come back flagged, not thrown") {
  Sample s;
  s.threshold.scalar = kInfiniteThreshold;
  Rng rng(3);
  for (int i = 0; i < 64; ++i) {
    double x = rng.next_gaussian();
    double y = rng.next_unit_open() < 1.0 / (1.0 + std::exp(-x)) ? 1.0 : 0.0;
    SampleItem si;
    si.item = WeightedItem(std::to_string(i), std::vector<double>{y, x}, 1.0);
    si.inclusion_cdf = 1.0;
    s.items.push_back(std::move(si));
  }
  // An iteration budget too small to reach the gradient tolerance from a
  // far-off start returns the last iterate, flagged.
  FitOptions options;
  options.max_iters = 1;
  Estimate e = weighted_loss_fit(s, LogisticLoss{1}, {25.0}, options);
  CHECK_FALSE(e.converged);
  CHECK(std::isfinite(e.scalar()));
}

TEST_CASE("degree-2 U-statistic: census variance, constants, Monte-Carlo unbiasedness") {
  Sample census = census_sample({1, 2, 3});
  CHECK(u_statistic_degree2(census, variance_kernel, 3).scalar() == doctest::Approx(1.0));

  Sample constant = census_sample({4, 4, 4, 4});
  CHECK(u_statistic_degree2(constant, variance_kernel, 4).scalar() == 0.0);

  // Population 1..8 with weights = values: unbiased for the population's
  // unbiased sample variance (= 6).
  auto population = linear_population(8);
  double mean = 4.5, ssq = 0.0;
  for (int i = 1; i <= 8; ++i) ssq += (i - mean) * (i - mean);
  double truth = ssq / 7.0;
  Accumulator acc;
  for (std::uint64_t r = 0; r < 100000; ++r) {
    Sample s = draw_fixed_k(population, 4, replicate_seed(9, r));
    acc.push(u_statistic_degree2(s, variance_kernel, 8).scalar());
  }
  CHECK(std::fabs(acc.z_against(truth)) <= 4.0);
}

TEST_CASE("subsampled bootstrap: degenerate cases and spread behavior") {
  auto population = linear_population(12);
  Sample s = draw_fixed_k(population, 6, 31);
  Rng rng(5);

  auto weighted_mean = [](const Sample& sub) {
    double num = 0.0, den = 0.0;
    for (const auto& si : sub.items) {
      num += si.item.weight / si.inclusion_cdf * si.item.x();
      den += si.item.weight / si.inclusion_cdf;
    }
    return num / den;
  };

  // B=1 with v=|J| is the statistic on the whole sample.
  Estimate whole = subsampled_bootstrap(s, weighted_mean, static_cast<int>(s.size()), 1, rng);
  CHECK(whole.scalar() == doctest::Approx(weighted_mean(s)));

  CHECK_THROWS_AS(subsampled_bootstrap(s, weighted_mean, static_cast<int>(s.size()) + 1, 5, rng),
                  error);

  // The bootstrap mean concentrates as B grows (its spread is var/B).
  double dev_small = 0.0, dev_large = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r1(replicate_seed(41, seed)), r2(replicate_seed(42, seed));
    double direct = weighted_mean(s);
    dev_small += std::fabs(subsampled_bootstrap(s, weighted_mean, 3, 8, r1).scalar() - direct);
    dev_large += std::fabs(subsampled_bootstrap(s, weighted_mean, 3, 512, r2).scalar() - direct);
  }
  CHECK(dev_large < dev_small);
}

TEST_CASE("subsampled bootstrap of regression coefficients stays in the spread band") {
  const int n = 400;
  Rng rng(77);
  std::vector<WeightedItem> population;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_gaussian();
    double p = 1.0 / (1.0 + std::exp(-0.8 * x));
    double y = rng.next_unit_open() < p ? 1.0 : 0.0;
    population.emplace_back(std::to_string(i), std::vector<double>{y, x}, 1.0);
  }
  Sample s = draw_fixed_k(population, 80, 13);
  auto coefficient = [](const Sample& sub) {
    return weighted_loss_fit(sub, LogisticLoss{1}).scalar();
  };
  double direct = coefficient(s);
  Rng boot_rng(3);
  Estimate boot = subsampled_bootstrap(s, coefficient, 40, 200, boot_rng);
  REQUIRE(boot.variance.has_value());
  double spread = std::sqrt((*boot.variance)[0]);
  CHECK(std::fabs(boot.scalar() - direct) <= spread);
}
