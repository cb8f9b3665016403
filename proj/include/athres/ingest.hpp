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
#include <functional>
#include <istream>
#include <string>

#include "athres/weighted_item.hpp"

namespace athres {

enum class IngestFormat { jsonl, csv };

struct IngestStats {
  std::uint64_t accepted = 0;
  std::uint64_t rejected_records = 0;  // invalid weight or missing fields
  std::uint64_t malformed_lines = 0;   // unparseable lines
};

// Streams validated items from jsonl ({"id":..,"w":..,"x":..[,"stratum"][,"t"]})
// or headered csv (id,w,x...[,stratum][,t]). Record-level problems are
// counted and skipped; the stream keeps going.
IngestStats ingest(std::istream& in, IngestFormat format,
                   const std::function<void(WeightedItem)>& sink);

// Opens `path` ("-" = stdin). Unreadable files are fatal.
IngestStats ingest_path(const std::string& path, IngestFormat format,
                        const std::function<void(WeightedItem)>& sink);

}  // namespace athres
