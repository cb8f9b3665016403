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

#include "athres/accumulators.hpp"
#include "athres/sample.hpp"

namespace athres {

// One estimator under test: a name, the value function, and the population
// truth its Monte-Carlo mean is held against.
struct EstimatorBinding {
  std::string name;
  std::function<double(const Sample&)> fn;
  double truth = 0.0;
};

struct UnbiasednessReport {
  struct Row {
    std::string name;
    double truth = 0.0;
    double mc_mean = 0.0;
    double se = 0.0;
    double z = 0.0;
    double empirical_variance = 0.0;
    bool refused = false;       // estimator raised a degree-cap violation
    std::string refusal;
    bool pass = false;          // |z| <= 4 (refused rows never pass)
  };
  std::uint64_t replicates = 0;
  std::vector<Row> rows;
  bool all_pass = false;  // over non-refused rows; refusals are reported as-is
};

// Runs `replicates` independent sample-and-estimate rounds over a fixed
// population and standardizes each estimator's deviation from its truth.
// Degree-cap refusals are recorded rather than failing the run; callers that
// expect a refusal assert on the row.
UnbiasednessReport verify_unbiasedness(const std::function<Sample(std::uint64_t)>& run,
                                       std::span<const EstimatorBinding> estimators,
                                       std::uint64_t replicates, std::uint64_t seed);

}  // namespace athres
