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

#include "athres/envelope.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace athres {

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, ptr);
}

// Ids and stratum labels are free-form; escape whitespace, '%' and newlines
// so every record stays one token per field on one line.
std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (c == '%' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = std::isxdigit(static_cast<unsigned char>(s[i + 1]))
                   ? std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)
                   : -1;
      if (hi >= 0) {
        out += static_cast<char>(hi);
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

void append_item_fields(std::string& out, const WeightedItem& item) {
  out += escape(item.id);
  out += ' ';
  append_double(out, item.weight);
  out += ' ';
  out += std::to_string(item.value.size());
  for (double x : item.value) {
    out += ' ';
    append_double(out, x);
  }
}

struct Reader {
  std::string_view text;
  std::size_t pos = 0;
  int line = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw_error(errc::parse_error, "envelope line " + std::to_string(line) + ": " + why);
  }

  bool next_line(std::string_view& out) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    out = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    return true;
  }
};

struct Tokens {
  std::vector<std::string_view> parts;
  const Reader* reader;
  std::size_t next = 0;

  Tokens(std::string_view line, const Reader& r) : reader(&r) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && line[i] == ' ') ++i;
      std::size_t start = i;
      while (i < line.size() && line[i] != ' ') ++i;
      if (i > start) parts.push_back(line.substr(start, i - start));
    }
  }

  bool empty() const { return next >= parts.size(); }
  std::string_view peek() const { return empty() ? std::string_view{} : parts[next]; }

  std::string_view token(const char* what) {
    if (empty()) reader->fail(std::string("expected ") + what);
    return parts[next++];
  }

  double number(const char* what) {
    std::string_view t = token(what);
    double v;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      reader->fail(std::string("bad number for ") + what);
    }
    return v;
  }

  std::uint64_t integer(const char* what) {
    std::string_view t = token(what);
    std::uint64_t v;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      reader->fail(std::string("bad integer for ") + what);
    }
    return v;
  }
};

WeightedItem parse_item_fields(Tokens& t) {
  WeightedItem item;
  item.id = unescape(t.token("id"));
  item.weight = t.number("weight");
  std::uint64_t dim = t.integer("payload size");
  item.value.reserve(dim);
  for (std::uint64_t i = 0; i < dim; ++i) item.value.push_back(t.number("payload"));
  return item;
}

}  // namespace

bool envelope_mergeable(const Sample& sample) {
  for (const SampleItem& si : sample.items) {
    if (!si.priority) return false;
  }
  return true;
}

std::string serialize_envelope(const Sample& sample) {
  std::string out;
  out.reserve(64 + sample.items.size() * 48);
  out += "athres-envelope v" + std::to_string(kEnvelopeFormatVersion) + "\n";

  out += "family " + sample.family.name();
  for (double p : sample.family.shape_params) {
    out += ' ';
    append_double(out, p);
  }
  out += '\n';

  out += "seed " + std::to_string(sample.seed) + "\n";

  out += "degree_cap ";
  out += sample.threshold.degree_cap == kDegreeCapSampleSize
             ? "k"
             : std::to_string(sample.threshold.degree_cap);
  out += '\n';

  out += "mergeable ";
  out += envelope_mergeable(sample) ? '1' : '0';
  out += '\n';

  out += "counters " + std::to_string(sample.counters.items_seen) + " " +
         std::to_string(sample.counters.heap_ops) + " " +
         std::to_string(sample.counters.threshold_updates) + "\n";

  out += "rejected " + std::to_string(sample.threshold.rejected.n) + " ";
  append_double(out, sample.threshold.rejected.mean);
  out += ' ';
  append_double(out, sample.threshold.rejected.m2);
  out += '\n';

  if (sample.threshold.is_keyed()) {
    out += "threshold keyed " + std::to_string(sample.threshold.keyed.size()) + "\n";
    for (const auto& [key, tau] : sample.threshold.keyed) {
      out += "key " + escape(key) + " ";
      append_double(out, tau);
      out += '\n';
    }
  } else {
    out += "threshold scalar ";
    append_double(out, sample.threshold.scalar);
    out += '\n';
  }

  if (!sample.threshold.stratum_counts.empty()) {
    out += "counts " + std::to_string(sample.threshold.stratum_counts.size()) + "\n";
    for (const auto& [key, n] : sample.threshold.stratum_counts) {
      out += "count " + escape(key) + " " + std::to_string(n) + "\n";
    }
  }

  if (sample.source) {
    out += "source ";
    append_double(out, sample.source->priority);
    out += ' ';
    append_item_fields(out, sample.source->item);
    out += '\n';
  }

  out += "items " + std::to_string(sample.items.size()) + "\n";
  for (const SampleItem& si : sample.items) {
    out += "item ";
    append_item_fields(out, si.item);
    out += " f ";
    append_double(out, si.inclusion_cdf);
    if (si.priority) {
      out += " p ";
      append_double(out, *si.priority);
    }
    if (si.generator_u) {
      out += " u ";
      append_double(out, *si.generator_u);
    }
    if (si.item.stratum) out += " s " + escape(*si.item.stratum);
    if (si.item.arrival_time) {
      out += " t ";
      append_double(out, *si.item.arrival_time);
    }
    out += '\n';
  }
  out += "end\n";
  return out;
}

Sample deserialize_envelope(std::string_view text) {
  Reader reader{text};
  Sample sample;
  std::string_view line;

  auto expect_line = [&](const char* what) {
    if (!reader.next_line(line)) reader.fail(std::string("missing ") + what);
    return Tokens(line, reader);
  };

  {
    Tokens t = expect_line("header");
    if (t.token("magic") != "athres-envelope" || t.token("version") != "v1") {
      reader.fail("not an athres-envelope v1 file");
    }
  }
  {
    Tokens t = expect_line("family");
    if (t.token("family") != "family") reader.fail("expected 'family'");
    std::string_view kind = t.token("family kind");
    if (kind == "uniform_scaled") {
      sample.family = PriorityFamily::uniform();
    } else if (kind == "exponential_rate") {
      sample.family = PriorityFamily::exponential();
    } else if (kind == "inverse_cdf_shape") {
      sample.family = PriorityFamily::power_shape(t.number("shape"));
    } else {
      reader.fail("unknown family");
    }
  }
  {
    Tokens t = expect_line("seed");
    if (t.token("seed") != "seed") reader.fail("expected 'seed'");
    sample.seed = t.integer("seed");
  }
  {
    Tokens t = expect_line("degree_cap");
    if (t.token("degree_cap") != "degree_cap") reader.fail("expected 'degree_cap'");
    std::string_view cap = t.token("cap");
    sample.threshold.degree_cap =
        cap == "k" ? kDegreeCapSampleSize : static_cast<int>(std::stol(std::string(cap)));
  }
  bool declared_mergeable = false;
  {
    Tokens t = expect_line("mergeable");
    if (t.token("mergeable") != "mergeable") reader.fail("expected 'mergeable'");
    declared_mergeable = t.token("flag") == "1";
  }
  {
    Tokens t = expect_line("counters");
    if (t.token("counters") != "counters") reader.fail("expected 'counters'");
    sample.counters.items_seen = t.integer("items_seen");
    sample.counters.heap_ops = t.integer("heap_ops");
    sample.counters.threshold_updates = t.integer("threshold_updates");
  }
  {
    Tokens t = expect_line("rejected");
    if (t.token("rejected") != "rejected") reader.fail("expected 'rejected'");
    sample.threshold.rejected.n = t.integer("n");
    sample.threshold.rejected.mean = t.number("mean");
    sample.threshold.rejected.m2 = t.number("m2");
  }
  {
    Tokens t = expect_line("threshold");
    if (t.token("threshold") != "threshold") reader.fail("expected 'threshold'");
    std::string_view scope = t.token("scope");
    if (scope == "scalar") {
      sample.threshold.scalar = t.number("tau");
    } else if (scope == "keyed") {
      std::uint64_t n = t.integer("key count");
      for (std::uint64_t i = 0; i < n; ++i) {
        Tokens kt = expect_line("key");
        if (kt.token("key") != "key") reader.fail("expected 'key'");
        std::string name = unescape(kt.token("name"));
        sample.threshold.keyed[name] = kt.number("tau");
      }
    } else {
      reader.fail("unknown threshold scope");
    }
  }

  // Optional sections in canonical order: counts, source, then items.
  if (!reader.next_line(line)) reader.fail("missing items");
  Tokens t(line, reader);
  std::string_view tag = t.token("section");
  if (tag == "counts") {
    std::uint64_t n = t.integer("count entries");
    for (std::uint64_t i = 0; i < n; ++i) {
      Tokens ct = expect_line("count");
      if (ct.token("count") != "count") reader.fail("expected 'count'");
      std::string name = unescape(ct.token("name"));
      sample.threshold.stratum_counts[name] = ct.integer("n");
    }
    if (!reader.next_line(line)) reader.fail("missing items");
    t = Tokens(line, reader);
    tag = t.token("section");
  }
  if (tag == "source") {
    ThresholdSource source;
    source.priority = t.number("priority");
    source.item = parse_item_fields(t);
    sample.source = source;
    sample.threshold.source_id = source.item.id;
    if (!reader.next_line(line)) reader.fail("missing items");
    t = Tokens(line, reader);
    tag = t.token("section");
  }
  if (tag != "items") reader.fail("expected 'items'");
  std::uint64_t count = t.integer("item count");
  sample.items.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Tokens it = expect_line("item");
    if (it.token("item") != "item") reader.fail("expected 'item'");
    SampleItem si;
    si.item = parse_item_fields(it);
    while (!it.empty()) {
      std::string_view field = it.token("field tag");
      if (field == "f") {
        si.inclusion_cdf = it.number("inclusion cdf");
      } else if (field == "p") {
        si.priority = it.number("priority");
      } else if (field == "u") {
        si.generator_u = it.number("generator u");
      } else if (field == "s") {
        si.item.stratum = unescape(it.token("stratum"));
      } else if (field == "t") {
        si.item.arrival_time = it.number("arrival time");
      } else {
        reader.fail("unknown item field");
      }
    }
    sample.items.push_back(std::move(si));
  }
  {
    Tokens et = expect_line("end");
    if (et.token("end") != "end") reader.fail("expected 'end'");
  }
  if (declared_mergeable && !envelope_mergeable(sample)) {
    reader.fail("declared mergeable but some items lack priorities");
  }
  return sample;
}

void write_envelope_file(const std::string& path, const Sample& sample) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(errc::io_error, "cannot open '" + path + "' for writing");
  std::string text = serialize_envelope(sample);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw_error(errc::io_error, "failed writing '" + path + "'");
}

Sample read_envelope_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(errc::io_error, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize_envelope(buffer.str());
}

namespace {

bool items_identical(const WeightedItem& a, const WeightedItem& b) {
  return a.id == b.id && a.value == b.value && a.weight == b.weight && a.stratum == b.stratum &&
         a.arrival_time == b.arrival_time;
}

}  // namespace

bool samples_identical(const Sample& a, const Sample& b) {
  if (a.seed != b.seed || !(a.family == b.family)) return false;
  if (a.counters.items_seen != b.counters.items_seen || a.counters.heap_ops != b.counters.heap_ops ||
      a.counters.threshold_updates != b.counters.threshold_updates) {
    return false;
  }
  const ThresholdState& ta = a.threshold;
  const ThresholdState& tb = b.threshold;
  if (ta.scalar != tb.scalar || ta.keyed != tb.keyed || ta.degree_cap != tb.degree_cap ||
      !(ta.rejected == tb.rejected) || ta.stratum_counts != tb.stratum_counts ||
      ta.source_id != tb.source_id) {
    return false;
  }
  if (a.source.has_value() != b.source.has_value()) return false;
  if (a.source && (a.source->priority != b.source->priority ||
                   !items_identical(a.source->item, b.source->item))) {
    return false;
  }
  if (a.items.size() != b.items.size()) return false;
  for (std::size_t i = 0; i < a.items.size(); ++i) {
    const SampleItem& x = a.items[i];
    const SampleItem& y = b.items[i];
    if (x.inclusion_cdf != y.inclusion_cdf || x.priority != y.priority ||
        x.generator_u != y.generator_u || !items_identical(x.item, y.item)) {
      return false;
    }
  }
  return true;
}

}  // namespace athres
