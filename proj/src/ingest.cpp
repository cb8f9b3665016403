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

#include "athres/ingest.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace athres {

namespace {

using nlohmann::json;

bool item_ok(const WeightedItem& item) {
  return item.weight > 0.0 && std::isfinite(item.weight);
}

bool parse_jsonl_line(const std::string& line, WeightedItem& out) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  if (!j.contains("id") || !j.contains("w")) return false;
  if (j["id"].is_string()) {
    out.id = j["id"].get<std::string>();
  } else if (j["id"].is_number_integer()) {
    out.id = std::to_string(j["id"].get<long long>());
  } else {
    return false;
  }
  if (!j["w"].is_number()) return false;
  out.weight = j["w"].get<double>();
  out.value.clear();
  if (j.contains("x")) {
    if (j["x"].is_number()) {
      out.value.push_back(j["x"].get<double>());
    } else if (j["x"].is_array()) {
      for (const auto& v : j["x"]) {
        if (!v.is_number()) return false;
        out.value.push_back(v.get<double>());
      }
    } else {
      return false;
    }
  }
  if (j.contains("stratum")) {
    if (!j["stratum"].is_string()) return false;
    out.stratum = j["stratum"].get<std::string>();
  } else {
    out.stratum.reset();
  }
  if (j.contains("t")) {
    if (!j["t"].is_number()) return false;
    out.arrival_time = j["t"].get<double>();
  } else {
    out.arrival_time.reset();
  }
  return true;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

struct CsvLayout {
  int id = -1;
  int w = -1;
  std::vector<int> payload;
  int stratum = -1;
  int t = -1;
  bool valid() const { return id >= 0 && w >= 0; }
};

CsvLayout parse_csv_header(const std::string& line) {
  CsvLayout layout;
  auto fields = split_csv(line);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string& name = fields[i];
    int idx = static_cast<int>(i);
    if (name == "id") {
      layout.id = idx;
    } else if (name == "w") {
      layout.w = idx;
    } else if (name == "stratum") {
      layout.stratum = idx;
    } else if (name == "t") {
      layout.t = idx;
    } else if (!name.empty() && name[0] == 'x') {
      layout.payload.push_back(idx);
    }
  }
  return layout;
}

bool parse_number(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_csv_line(const std::string& line, const CsvLayout& layout, WeightedItem& out) {
  auto fields = split_csv(line);
  auto get = [&](int idx) -> const std::string* {
    return idx >= 0 && idx < static_cast<int>(fields.size()) ? &fields[idx] : nullptr;
  };
  const std::string* id = get(layout.id);
  const std::string* w = get(layout.w);
  if (!id || !w || !parse_number(*w, out.weight)) return false;
  out.id = *id;
  out.value.clear();
  for (int idx : layout.payload) {
    const std::string* x = get(idx);
    double v;
    if (!x || !parse_number(*x, v)) return false;
    out.value.push_back(v);
  }
  out.stratum.reset();
  if (const std::string* s = get(layout.stratum); s && !s->empty()) out.stratum = *s;
  out.arrival_time.reset();
  if (const std::string* ts = get(layout.t); ts && !ts->empty()) {
    double v;
    if (!parse_number(*ts, v)) return false;
    out.arrival_time = v;
  }
  return true;
}

}  // namespace

IngestStats ingest(std::istream& in, IngestFormat format,
                   const std::function<void(WeightedItem)>& sink) {
  IngestStats stats;
  std::string line;
  CsvLayout layout;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == IngestFormat::csv && !header_done) {
      layout = parse_csv_header(line);
      header_done = true;
      if (!layout.valid()) {
        throw_error(errc::parse_error, "csv header must name 'id' and 'w' columns");
      }
      continue;
    }
    WeightedItem item;
    bool parsed = format == IngestFormat::jsonl ? parse_jsonl_line(line, item)
                                                : parse_csv_line(line, layout, item);
    if (!parsed) {
      ++stats.malformed_lines;
      continue;
    }
    if (!item_ok(item)) {
      ++stats.rejected_records;
      continue;
    }
    ++stats.accepted;
    sink(std::move(item));
  }
  return stats;
}

IngestStats ingest_path(const std::string& path, IngestFormat format,
                        const std::function<void(WeightedItem)>& sink) {
  if (path == "-") return ingest(std::cin, format, sink);
  std::ifstream in(path);
  if (!in) throw_error(errc::io_error, "cannot open '" + path + "'");
  return ingest(in, format, sink);
}

}  // namespace athres
