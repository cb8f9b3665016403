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

#include <stdexcept>
#include <string>

namespace athres {

enum class errc {
  invalid_weight,
  invalid_threshold,
  invalid_sample_size,
  incompatible_thresholds,
  heavy_item_under_steady_state,
  threshold_increased,
  budget_exhausted,
  degenerate_inclusion,
  degree_cap_violation,
  missing_threshold_source,
  missing_alpha,
  empty_sample,
  insufficient_sample,
  incompatible_families,
  duplicate_item,
  not_mergeable,
  io_error,
  parse_error,
};

// Single exception type carrying a machine-checkable code; tests match on
// the code, messages are for humans.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void throw_error(errc code, const std::string& what) {
  throw error(code, what);
}

}  // namespace athres
