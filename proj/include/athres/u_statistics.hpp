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

#include <functional>
#include <numeric>
#include <vector>

#include "athres/accumulators.hpp"
#include "athres/estimators.hpp"

namespace athres {

// Kernel for the unbiased variance: h(x1, x2) = (x1 - x2)^2 / 2.
inline double variance_kernel(double x1, double x2) {
  double d = x1 - x2;
  return 0.5 * d * d;
}

// Degree-2 U-statistic over the retained pairs, inverse-probability weighted:
//   (2 / (n (n-1))) * sum_{i<j in J} h(x_i, x_j) / (F_i F_j).
// With the variance kernel this estimates the population's unbiased sample
// variance.
inline Estimate u_statistic_degree2(const Sample& sample,
                                    const std::function<double(double, double)>& kernel,
                                    std::uint64_t n_population) {
  require_degree(sample, 2);
  if (sample.items.size() < 2) {
    throw_error(errc::insufficient_sample, "degree-2 U-statistic needs at least two items");
  }
  if (n_population < 2) {
    throw_error(errc::insufficient_sample, "population must have at least two items");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < sample.items.size(); ++i) {
    double fi = inclusion_or_throw(sample.items[i]);
    double xi = sample.items[i].item.x();
    for (std::size_t j = i + 1; j < sample.items.size(); ++j) {
      double fj = inclusion_or_throw(sample.items[j]);
      total += kernel(xi, sample.items[j].item.x()) / (fi * fj);
    }
  }
  double n = static_cast<double>(n_population);
  Estimate e = Estimate::of(2.0 * total / (n * (n - 1.0)), 2, sample.size());
  return e;
}

// Monte-Carlo v-out-of-|J| bootstrap: averages a statistic over B uniformly
// drawn size-v subsets of the retained items. The statistic receives a
// sub-sample carrying the same threshold record, so inverse-probability
// weights apply inside it unchanged. Returns the resample mean and the
// spread (variance) across resamples.
template <typename RngT>
Estimate subsampled_bootstrap(const Sample& sample,
                              const std::function<double(const Sample&)>& statistic, int v, int B,
                              RngT& rng) {
  if (v < 1 || static_cast<std::size_t>(v) > sample.items.size()) {
    throw_error(errc::insufficient_sample, "subset size exceeds the retained sample");
  }
  if (B < 1) throw_error(errc::invalid_sample_size, "need at least one resample");
  require_degree(sample, v);

  std::vector<std::size_t> index(sample.items.size());
  std::iota(index.begin(), index.end(), 0);

  Sample scratch;
  scratch.threshold = sample.threshold;
  scratch.family = sample.family;
  scratch.seed = sample.seed;

  Accumulator acc;
  for (int b = 0; b < B; ++b) {
    // Partial Fisher-Yates: the first v slots become the resample.
    for (int i = 0; i < v; ++i) {
      std::size_t j = i + rng.next_below(index.size() - i);
      std::swap(index[i], index[j]);
    }
    scratch.items.clear();
    for (int i = 0; i < v; ++i) scratch.items.push_back(sample.items[index[i]]);
    acc.push(statistic(scratch));
  }
  Estimate e = Estimate::of(acc.mean, v, static_cast<std::size_t>(v));
  e.variance = {acc.variance()};
  return e;
}

}  // namespace athres
