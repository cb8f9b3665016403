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
#include <span>
#include <string>
#include <vector>

#include "athres/priority_family.hpp"
#include "athres/sample.hpp"
#include "athres/threshold_rules.hpp"

namespace athres {

// Empirical substitution-compatibility check: for every index set lambda with
// |lambda| <= v it estimates E[prod_{i in lambda} Z_i / F_i(tau_i)] by Monte
// Carlo. Compatible thresholding schemes give 1 for each lambda; the report
// flags deviations in standard-error units and passes when all |z| <= 4.
//
// Calibration constraint: under a size-k rule the product for |lambda| = m
// has finite variance only when m < (k+1)/2; keep v below that, or the
// standard errors are meaningless.
struct FactorizationReport {
  struct LambdaRow {
    std::vector<int> indices;
    double mean = 0.0;
    double se = 0.0;
    double z = 0.0;
  };
  std::string subject;
  int v = 1;
  std::uint64_t trials = 0;
  std::vector<LambdaRow> rows;
  double max_abs_z = 0.0;
  bool pass = false;
};

// Offline protocol: per trial, draw one priority per population item, apply
// the rule to the full vector, include items strictly below the threshold.
FactorizationReport check_factorization(const ThresholdRule& rule, const PriorityFamily& family,
                                        std::span<const double> weights, int v,
                                        std::uint64_t trials, std::uint64_t seed);

// Sampler protocol: `run` produces a finalized sample of the fixed population
// for a given replicate seed. Population items must carry ids "0".."n-1".
// Covers streaming samplers, merges and compositions uniformly, and checks
// exactly the inclusion probabilities estimators consume.
FactorizationReport check_factorization_sampler(
    const std::function<Sample(std::uint64_t)>& run, int population_size, int v,
    std::uint64_t trials, std::uint64_t seed, const std::string& subject);

}  // namespace athres
