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

#include <cstddef>
#include <optional>
#include <vector>

namespace athres {

// Result of an estimator: point value(s), optional variance (scalar or
// row-major matrix for vector-valued estimates), the interaction degree the
// estimator required, and the effective sample size it used.
struct Estimate {
  std::vector<double> value;
  std::optional<std::vector<double>> variance;
  int degree_used = 1;
  std::size_t n_effective = 0;
  bool converged = true;

  double scalar() const { return value.front(); }
  double scalar_variance() const { return variance ? variance->front() : 0.0; }

  static Estimate of(double v, int degree, std::size_t n_eff) {
    Estimate e;
    e.value = {v};
    e.degree_used = degree;
    e.n_effective = n_eff;
    return e;
  }
};

}  // namespace athres
