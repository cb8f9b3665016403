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

#include <cstdint>
#include <optional>
#include <vector>

namespace athres {

// Streaming logistic regression with a rotating decision boundary:
//   beta_1(t) = c sin(pi t), beta_2(t) = c cos(pi t),
//   p(y=1 | x) = logistic(beta_1 x_1 + beta_2 x_2),
// covariates standard normal, arrival times a conditioned homogeneous
// Poisson process on (0,1) (i.e. sorted uniforms).
//
// Two fast priority reservoirs with forward-decay weights compete under
// common random numbers:
//   (a) decay only            w = exp(decay * t)
//   (b) local case-control    w = exp(decay * t) * surprise, where surprise
//       is p~(x) for y=0 and 1-p~(x) for y=1 under the arm's current fit,
//       clamped away from 0 and 1.
// Both are refit per batch and compared against the no-sampling
// decay-weighted fit on the full history.
struct LogisticSimSpec {
  // How the case-control arm is refit.
  //   conditional_offset: conditional logistic likelihood of the retained
  //     items, with the per-item selection tilt (from the pilot margin stored
  //     at arrival) entering as a fixed offset. Keeps the effective sample
  //     size at k and realizes the design's gain.
  //   inverse_probability: plain Horvitz-Thompson weighting of the decay
  //     loss, for comparison; its 1/surprise coefficients shrink the
  //     effective sample size.
  enum class CaseControlRefit { conditional_offset, inverse_probability };

  std::size_t n_points = 1'000'000;
  double c = 2.8;
  std::size_t batch = 50;
  // Forward-decay rate lambda_d; weights grow as exp(lambda_d * t) so stored
  // priorities never need recomputation. Default half-life: 0.1 time units.
  double decay = 6.931471805599453;
  std::size_t k = 1000;
  std::size_t init_items = 1000;
  std::uint64_t seed = 1;
  // Grid on which the full-data reference fit is evaluated.
  std::size_t checkpoints = 100;
  // Forces the pilot probability to a constant (testing hook).
  std::optional<double> pilot_override;
  // The pilot probability is clamped to [floor, 1-floor] before the surprise
  // weight is formed, which bounds both near-zero weights and the selection
  // tilt. Floors below ~0.05 let the inverse-probability coefficients of
  // rarely-selected items dominate the refit variance and make the
  // case-control arm worse than the plain decay baseline.
  double surprise_floor = 0.1;
  CaseControlRefit cc_refit = CaseControlRefit::inverse_probability;
};

struct LogisticSimResult {
  // Mean of min(p, 1-p) over the generated stream; the optimal average
  // prediction error of the generator.
  double optimal_error_estimate = 0.0;
  // Time-averaged squared L2 distance of each sampler's coefficients from
  // the full-data decay-weighted fit, and their ratio. Squared error is the
  // convention under which an error ratio of r equals needing 1/r as many
  // samples.
  double decay_only_l2 = 0.0;
  double case_control_l2 = 0.0;
  double error_ratio = 0.0;
  std::uint64_t nonconvergent_refits = 0;

  struct SeriesRow {
    double t = 0.0;
    double err_decay = 0.0;
    double err_case_control = 0.0;
  };
  std::vector<SeriesRow> series;
};

LogisticSimResult run_logistic_sim(const LogisticSimSpec& spec);

}  // namespace athres
