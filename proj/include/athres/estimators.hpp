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
#include <functional>
#include <optional>
#include <vector>

#include "athres/estimate.hpp"
#include "athres/rng.hpp"
#include "athres/sample.hpp"

namespace athres {

// Refuses estimators whose interaction degree exceeds what the sample's
// thresholding scheme licenses. A rule-level cap (multi-objective, max-merge)
// binds regardless of sample size; strongly compatible schemes support
// degrees up to the realized |J|.
inline void require_degree(const Sample& sample, int degree) {
  int cap = sample.threshold.degree_cap;
  if (cap == kDegreeCapSampleSize) {
    cap = std::max<int>(1, static_cast<int>(sample.items.size()));
  }
  if (degree > cap) {
    throw_error(errc::degree_cap_violation,
                "estimator degree " + std::to_string(degree) + " exceeds the sample's cap of " +
                    std::to_string(cap));
  }
}

inline double inclusion_or_throw(const SampleItem& si) {
  if (!(si.inclusion_cdf > 0.0)) {
    throw_error(errc::degenerate_inclusion,
                "retained item '" + si.item.id + "' has zero inclusion probability");
  }
  return si.inclusion_cdf;
}

// Horvitz-Thompson style subset sum: S_hat = sum x_i / F_i(tau_i).
inline Estimate subset_sum_ht(const Sample& sample) {
  require_degree(sample, 1);
  double total = 0.0;
  for (const SampleItem& si : sample.items) total += si.item.x() / inclusion_or_throw(si);
  return Estimate::of(total, 1, sample.size());
}

// Unbiased variance of the subset-sum estimator:
// sum x_i^2 (1 - F_i) / F_i^2 over retained items.
inline Estimate subset_sum_variance(const Sample& sample) {
  require_degree(sample, 2);
  double total = 0.0;
  for (const SampleItem& si : sample.items) {
    double f = inclusion_or_throw(si);
    double x = si.item.x();
    total += x * x * (1.0 - f) / (f * f);
  }
  Estimate e = Estimate::of(total, 2, sample.size());
  return e;
}

// Threshold inclusion averaging: forget which of the k+1 stored items is the
// threshold and average the base estimator over the candidates, weighting
// candidate j by p(R_j = tau | J~) proportional to f_j(tau) / F_j(tau).
inline Estimate threshold_inclusion_estimate(
    const Sample& sample, const std::function<double(const Sample&)>& base_estimator,
    int base_degree = 1) {
  if (!sample.source) {
    throw_error(errc::missing_threshold_source, "sample does not record the threshold item");
  }
  require_degree(sample, base_degree);
  if (sample.threshold.is_keyed()) {
    throw_error(errc::incompatible_thresholds, "threshold inclusion needs a scalar threshold");
  }
  double tau = sample.threshold.scalar;

  std::vector<SampleItem> pool = sample.items;
  SampleItem source_item;
  source_item.item = sample.source->item;
  source_item.priority = sample.source->priority;
  source_item.inclusion_cdf = cdf_at(sample.family, sample.source->item.weight, tau);
  pool.push_back(std::move(source_item));

  std::vector<double> weights(pool.size());
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    double f = cdf_at(sample.family, pool[j].item.weight, tau);
    double density = pdf_at(sample.family, pool[j].item.weight, tau);
    weights[j] = f > 0.0 ? density / f : 0.0;
    weight_sum += weights[j];
  }
  if (!(weight_sum > 0.0)) {
    throw_error(errc::degenerate_inclusion, "no candidate can realize the threshold");
  }

  double total = 0.0;
  Sample scratch;
  scratch.threshold = sample.threshold;
  scratch.family = sample.family;
  scratch.seed = sample.seed;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    if (weights[j] == 0.0) continue;
    scratch.items.clear();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (i != j) scratch.items.push_back(pool[i]);
    }
    total += (weights[j] / weight_sum) * base_estimator(scratch);
  }
  Estimate e = Estimate::of(total, base_degree, pool.size());
  return e;
}

enum class AlphaMode { exact, plug_in };

// Weighted cdf estimate at x. Exact mode divides by the known total weight
// alpha and is unbiased; plug-in mode divides by the estimated total and is
// consistent with range exactly [0, 1].
inline double weighted_cdf(const Sample& sample, double x, AlphaMode mode,
                           std::optional<double> alpha = std::nullopt) {
  require_degree(sample, 1);
  if (mode == AlphaMode::exact && !alpha) {
    throw_error(errc::missing_alpha, "exact mode needs the population weight total");
  }
  double hits = 0.0;
  double mass = 0.0;
  for (const SampleItem& si : sample.items) {
    double ht = si.item.weight / inclusion_or_throw(si);
    mass += ht;
    if (si.item.x() <= x) hits += ht;
  }
  double denom = mode == AlphaMode::exact ? *alpha : mass;
  if (denom == 0.0) return 0.0;
  return hits / denom;
}

// Left-continuous generalized inverse of the plug-in cdf over the retained
// values: the smallest stored x with G_hat(x) >= q.
inline double weighted_quantile(const Sample& sample, double q) {
  if (sample.items.empty()) throw_error(errc::empty_sample, "quantile of an empty sample");
  if (!(q > 0.0 && q < 1.0)) throw_error(errc::parse_error, "quantile level must be in (0,1)");
  require_degree(sample, 1);
  std::vector<std::pair<double, double>> points;  // (x, HT mass)
  points.reserve(sample.items.size());
  double total = 0.0;
  for (const SampleItem& si : sample.items) {
    double ht = si.item.weight / inclusion_or_throw(si);
    points.emplace_back(si.item.x(), ht);
    total += ht;
  }
  std::sort(points.begin(), points.end());
  double cum = 0.0;
  for (const auto& [x, mass] : points) {
    cum += mass;
    if (cum >= q * total) return x;
  }
  return points.back().first;
}

}  // namespace athres
