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
#include <limits>
#include <string>
#include <vector>

#include "athres/errors.hpp"
#include "athres/rng.hpp"
#include "athres/weighted_item.hpp"

namespace athres {

inline constexpr double kInfiniteThreshold = std::numeric_limits<double>::infinity();

// Per-item priority distribution, parameterized by the item weight w.
//
//   uniform_scaled    R = U/w            cdf(r) = min(1, w r)
//   exponential_rate  R ~ Exponential(w) cdf(r) = 1 - exp(-w r)
//   inverse_cdf_shape a common shape F(x) = x^gamma on [0,1] with the
//                     per-item transform alpha(w) = w, so cdf(r) = F(w r).
//
// uniform_scaled is inverse_cdf_shape with gamma = 1; it is kept as its own
// kind because the fast reservoir sampler relies on its exact form.
enum class FamilyKind { uniform_scaled, exponential_rate, inverse_cdf_shape };

struct PriorityFamily {
  FamilyKind kind = FamilyKind::uniform_scaled;
  std::vector<double> shape_params;  // inverse_cdf_shape: {gamma}, gamma > 0

  static PriorityFamily uniform() { return {FamilyKind::uniform_scaled, {}}; }
  static PriorityFamily exponential() { return {FamilyKind::exponential_rate, {}}; }
  static PriorityFamily power_shape(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
      throw_error(errc::parse_error, "shape exponent must be positive and finite");
    }
    return {FamilyKind::inverse_cdf_shape, {gamma}};
  }

  double gamma() const { return shape_params.empty() ? 1.0 : shape_params.front(); }

  bool operator==(const PriorityFamily& other) const {
    return kind == other.kind && shape_params == other.shape_params;
  }

  std::string name() const {
    switch (kind) {
      case FamilyKind::uniform_scaled: return "uniform_scaled";
      case FamilyKind::exponential_rate: return "exponential_rate";
      case FamilyKind::inverse_cdf_shape: return "inverse_cdf_shape";
    }
    return "?";
  }
};

// P(R <= tau) for an item of the given weight. tau = +inf means "accept
// everything" and evaluates to 1 for every family.
inline double cdf_at(const PriorityFamily& family, double weight, double tau) {
  validate_weight(weight);
  if (std::isnan(tau) || tau < 0.0) {
    throw_error(errc::invalid_threshold, "threshold must be >= 0 or +inf");
  }
  if (tau == kInfiniteThreshold) return 1.0;
  switch (family.kind) {
    case FamilyKind::uniform_scaled:
      return std::min(1.0, weight * tau);
    case FamilyKind::exponential_rate:
      return -std::expm1(-weight * tau);
    case FamilyKind::inverse_cdf_shape:
      return std::pow(std::min(1.0, weight * tau), family.gamma());
  }
  return 0.0;
}

// Density of R at r; zero outside the support.
inline double pdf_at(const PriorityFamily& family, double weight, double r) {
  validate_weight(weight);
  if (!std::isfinite(r) || r < 0.0) return 0.0;
  switch (family.kind) {
    case FamilyKind::uniform_scaled:
      return (r <= 1.0 / weight) ? weight : 0.0;
    case FamilyKind::exponential_rate:
      return weight * std::exp(-weight * r);
    case FamilyKind::inverse_cdf_shape: {
      if (r > 1.0 / weight) return 0.0;
      double g = family.gamma();
      return g * weight * std::pow(weight * r, g - 1.0);
    }
  }
  return 0.0;
}

// Quantile transform: r with cdf_at(family, weight, r) = u, for u in (0,1).
inline double inverse_cdf(const PriorityFamily& family, double weight, double u) {
  validate_weight(weight);
  switch (family.kind) {
    case FamilyKind::uniform_scaled:
      return u / weight;
    case FamilyKind::exponential_rate:
      return -std::log1p(-u) / weight;
    case FamilyKind::inverse_cdf_shape:
      return std::pow(u, 1.0 / family.gamma()) / weight;
  }
  return 0.0;
}

// A generated priority. generator_u is the underlying uniform draw; it is
// retained so that multi-objective samplers can share one U per item.
struct Priority {
  double value = 0.0;
  double generator_u = 0.0;
};

// Draws R ~ F_w from the family. The uniform comes from the caller's stream
// generator; use priority_from_uniform with item_uniform() for the
// reproducible keyed mode.
template <typename RngT>
Priority gen_priority(const WeightedItem& item, const PriorityFamily& family, RngT& rng) {
  validate_weight(item.weight);
  double u = rng.next_unit_open();
  return Priority{inverse_cdf(family, item.weight, u), u};
}

inline Priority priority_from_uniform(const PriorityFamily& family, double weight, double u) {
  validate_weight(weight);
  return Priority{inverse_cdf(family, weight, u), u};
}

}  // namespace athres
