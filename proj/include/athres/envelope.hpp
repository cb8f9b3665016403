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

#include <string>
#include <string_view>

#include "athres/sample.hpp"

namespace athres {

inline constexpr int kEnvelopeFormatVersion = 1;

// Line-delimited text envelope for samples: explicit format version,
// canonical field order, shortest-round-trip float formatting. Two samples
// with identical fields serialize to identical bytes, which is what the
// golden tests pin down.
std::string serialize_envelope(const Sample& sample);
Sample deserialize_envelope(std::string_view text);

void write_envelope_file(const std::string& path, const Sample& sample);
Sample read_envelope_file(const std::string& path);

// An envelope can be merged when every retained item still carries its
// priority, so the union can be re-filtered against a lower threshold.
bool envelope_mergeable(const Sample& sample);

// Exact field-for-field equality (bitwise on floats).
bool samples_identical(const Sample& a, const Sample& b);

}  // namespace athres
