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

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "athres/errors.hpp"

namespace athres {

// One observation in a stream: identity, payload vector (the payload may hold
// a response plus covariates), a positive weight, and optional stratum label
// and arrival time.
struct WeightedItem {
  std::string id;
  std::vector<double> value;
  double weight = 1.0;
  std::optional<std::string> stratum;
  std::optional<double> arrival_time;

  WeightedItem() = default;
  WeightedItem(std::string id_, double x, double w)
      : id(std::move(id_)), value{x}, weight(w) {}
  WeightedItem(std::string id_, std::vector<double> x, double w)
      : id(std::move(id_)), value(std::move(x)), weight(w) {}

  // Scalar payload accessor used by the subset-sum style estimators.
  double x() const { return value.empty() ? 0.0 : value.front(); }
};

inline void validate_weight(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw_error(errc::invalid_weight, "item weight must be positive and finite");
  }
}

}  // namespace athres
