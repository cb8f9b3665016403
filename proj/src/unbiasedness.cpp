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

#include "athres/unbiasedness.hpp"

#include <cmath>

#include "athres/errors.hpp"
#include "athres/rng.hpp"

namespace athres {

UnbiasednessReport verify_unbiasedness(const std::function<Sample(std::uint64_t)>& run,
                                       std::span<const EstimatorBinding> estimators,
                                       std::uint64_t replicates, std::uint64_t seed) {
  if (replicates < 1) throw_error(errc::invalid_sample_size, "need at least one replicate");
  UnbiasednessReport report;
  report.replicates = replicates;
  report.rows.resize(estimators.size());
  std::vector<Accumulator> acc(estimators.size());
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    report.rows[i].name = estimators[i].name;
    report.rows[i].truth = estimators[i].truth;
  }

  for (std::uint64_t r = 0; r < replicates; ++r) {
    Sample sample = run(replicate_seed(seed, r));
    for (std::size_t i = 0; i < estimators.size(); ++i) {
      if (report.rows[i].refused) continue;
      try {
        acc[i].push(estimators[i].fn(sample));
      } catch (const error& e) {
        if (e.code() == errc::degree_cap_violation ||
            e.code() == errc::missing_threshold_source) {
          report.rows[i].refused = true;
          report.rows[i].refusal = e.what();
        } else {
          throw;
        }
      }
    }
  }

  report.all_pass = true;
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    UnbiasednessReport::Row& row = report.rows[i];
    if (row.refused) {
      report.all_pass = false;
      continue;
    }
    row.mc_mean = acc[i].mean;
    row.se = acc[i].se_of_mean();
    row.empirical_variance = acc[i].variance();
    row.z = acc[i].z_against(row.truth);
    row.pass = std::fabs(row.z) <= 4.0;
    if (!row.pass) report.all_pass = false;
  }
  return report;
}

}  // namespace athres
