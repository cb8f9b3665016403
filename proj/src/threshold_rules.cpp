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

#include "athres/threshold_rules.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace athres {

double fixed_k_threshold(std::span<const double> priorities, int k) {
  if (k < 1) throw_error(errc::invalid_sample_size, "fixed_k requires k >= 1");
  if (priorities.size() <= static_cast<std::size_t>(k)) return kInfiniteThreshold;
  std::vector<double> buf(priorities.begin(), priorities.end());
  std::nth_element(buf.begin(), buf.begin() + k, buf.end());
  return buf[k];
}

double wegman_threshold(double r) {
  if (!(r > 0.0)) throw_error(errc::invalid_threshold, "wegman bracket requires r > 0");
  if (std::isinf(r)) return kInfiniteThreshold;
  int exp;
  double mant = std::frexp(r, &exp);  // r = mant * 2^exp, mant in [0.5, 1)
  // mant == 0.5 means r is itself a power of two and sits on the bracket edge.
  return mant == 0.5 ? r : std::ldexp(1.0, exp - 1);
}

double variance_adapted_update(const Accumulator& rejected, double tau_n, std::uint64_t n,
                               double eps, double k_min, bool paper_formula) {
  if (!(eps > 0.0)) throw_error(errc::parse_error, "var_adapt requires eps > 0");
  double mu = rejected.mean;
  double sigma = rejected.stddev();
  double k_hat;
  if (!(sigma > 0.0)) {
    k_hat = k_min;
  } else if (mu == 0.0 && !paper_formula) {
    // Relative error of a zero mean is undefined; leave the threshold alone.
    return tau_n;
  } else {
    double ratio = paper_formula ? (mu * mu) / (sigma * sigma) : (sigma * sigma) / (mu * mu);
    k_hat = std::max(k_min, ratio / (eps * eps));
  }
  double candidate = k_hat / static_cast<double>(n + 1);
  return std::min(tau_n, candidate);
}

double apply_rule_offline(const ThresholdRule& rule, std::span<const double> priorities) {
  std::vector<double> sorted(priorities.begin(), priorities.end());
  std::sort(sorted.begin(), sorted.end());
  RuleContext ctx;
  ctx.items_seen = priorities.size();
  Accumulator none;
  ctx.rejected = &none;
  ctx.current_tau = rule.initial_tau();
  return rule.update(sorted, ctx);
}

namespace {

// Tiny recursive-descent parser for the rule grammar.
struct RuleParser {
  const std::string& text;
  std::size_t pos = 0;
  bool paper_formula;

  explicit RuleParser(const std::string& t, bool paper) : text(t), paper_formula(paper) {}

  [[noreturn]] void fail(const std::string& why) {
    throw_error(errc::parse_error, "bad rule '" + text + "': " + why);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    if (start == pos) fail("expected rule name");
    return text.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }

  RulePtr rule() {
    std::string name = ident();
    if (name == "identity") return std::make_shared<IdentityRule>();
    if (name == "peek") return std::make_shared<PeekRule>();
    if (name == "fixed_k" || name == "wegman" || name == "var_adapt") {
      if (!consume(':')) fail(name + " needs a ':<param>'");
      double v = number();
      if (name == "fixed_k") return std::make_shared<FixedKRule>(static_cast<int>(v));
      if (name == "wegman") return std::make_shared<WegmanRule>(static_cast<int>(v));
      return std::make_shared<VarAdaptRule>(v, 30.0, paper_formula);
    }
    if (name == "seq" || name == "min" || name == "max") {
      if (!consume('(')) fail(name + " needs '(<r1>,<r2>)'");
      RulePtr a = rule();
      if (!consume(',')) fail("expected ','");
      RulePtr b = rule();
      if (!consume(')')) fail("expected ')'");
      if (name == "seq") return std::make_shared<SequentialRule>(std::move(a), std::move(b));
      auto op = name == "min" ? CombineRule::Op::take_min : CombineRule::Op::take_max;
      return std::make_shared<CombineRule>(op, std::move(a), std::move(b));
    }
    fail("unknown rule '" + name + "'");
  }
};

}  // namespace

RulePtr parse_rule(const std::string& text, bool var_adapt_paper_formula) {
  RuleParser parser(text, var_adapt_paper_formula);
  RulePtr r = parser.rule();
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing characters");
  return r;
}

}  // namespace athres
