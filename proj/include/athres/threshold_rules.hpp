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

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "athres/accumulators.hpp"
#include "athres/errors.hpp"
#include "athres/threshold_state.hpp"

namespace athres {

// ---------------------------------------------------------------------------
// Primitive threshold computations
// ---------------------------------------------------------------------------

// (k+1)-th smallest priority, or +inf when n <= k. Equal priorities are
// ordered by position, which matches the samplers' (priority, arrival index)
// tie-break; the returned value is the same either way.
double fixed_k_threshold(std::span<const double> priorities, int k);

// The unique power 1/2^b with 1/2^b <= r < 1/2^(b-1). Exact exponent
// arithmetic, so the bracket test is bit-exact.
double wegman_threshold(double r_k_plus_1);

// Variance-adapted threshold update from rejected-item moments. Computes the
// sample size needed so that the mean estimate's standard deviation is about
// eps times the mean, then shrinks tau accordingly (never increases it).
//
// A common rendering of the size formula inverts the mean/deviation ratio;
// `paper_formula` selects that variant for comparison.
double variance_adapted_update(const Accumulator& rejected, double tau_n, std::uint64_t n,
                               double eps, double k_min = 30.0, bool paper_formula = false);

// ---------------------------------------------------------------------------
// Composable rules
// ---------------------------------------------------------------------------

struct RuleContext {
  std::uint64_t items_seen = 0;
  const Accumulator* rejected = nullptr;
  double current_tau = kInfiniteThreshold;
};

// A threshold rule maps the priorities under consideration to a new
// threshold. The same function serves offline evaluation (full priority
// vector) and the lazy sampler's overflow handling (reservoir contents).
class ThresholdRule {
 public:
  virtual ~ThresholdRule() = default;

  virtual std::string name() const = 0;

  // `sorted` must be ascending. Returns the rule's threshold for this set.
  virtual double update(std::span<const double> sorted, const RuleContext& ctx) const = 0;

  // Per-arrival update for rules that adapt between overflows.
  virtual double on_arrival(const RuleContext& ctx) const { return ctx.current_tau; }
  virtual bool updates_every_arrival() const { return false; }

  virtual double initial_tau() const { return kInfiniteThreshold; }
  virtual int degree_cap() const { return kDegreeCapSampleSize; }

  // Reservoir capacity at which a size-driven rule wants to be invoked;
  // 0 for rules that are not size-driven.
  virtual std::size_t natural_capacity() const { return 0; }
};

using RulePtr = std::shared_ptr<const ThresholdRule>;

class FixedKRule final : public ThresholdRule {
 public:
  explicit FixedKRule(int k) : k_(k) {
    if (k < 1) throw_error(errc::invalid_sample_size, "fixed_k requires k >= 1");
  }
  std::string name() const override { return "fixed_k:" + std::to_string(k_); }
  double update(std::span<const double> sorted, const RuleContext& ctx) const override {
    if (sorted.size() <= static_cast<std::size_t>(k_)) return ctx.current_tau;
    return sorted[k_];
  }
  std::size_t natural_capacity() const override { return static_cast<std::size_t>(k_); }
  int k() const { return k_; }

 private:
  int k_;
};

class WegmanRule final : public ThresholdRule {
 public:
  explicit WegmanRule(int k) : k_(k) {
    if (k < 1) throw_error(errc::invalid_sample_size, "wegman requires k >= 1");
  }
  std::string name() const override { return "wegman:" + std::to_string(k_); }
  double initial_tau() const override { return 1.0; }
  double update(std::span<const double> sorted, const RuleContext& ctx) const override {
    if (sorted.size() <= static_cast<std::size_t>(k_)) return ctx.current_tau;
    return wegman_threshold(sorted[k_]);
  }
  std::size_t natural_capacity() const override { return static_cast<std::size_t>(k_); }

 private:
  int k_;
};

class VarAdaptRule final : public ThresholdRule {
 public:
  explicit VarAdaptRule(double eps, double k_min = 30.0, bool paper_formula = false)
      : eps_(eps), k_min_(k_min), paper_formula_(paper_formula) {
    if (!(eps > 0.0)) throw_error(errc::parse_error, "var_adapt requires eps > 0");
  }
  std::string name() const override { return "var_adapt:" + std::to_string(eps_); }
  double initial_tau() const override { return 1.0; }
  bool updates_every_arrival() const override { return true; }
  double on_arrival(const RuleContext& ctx) const override {
    if (!ctx.rejected) return ctx.current_tau;
    // With no rejections yet the deviation is degenerate and the k_min floor
    // applies, which is also what bootstraps the rule.
    return variance_adapted_update(*ctx.rejected, ctx.current_tau, ctx.items_seen, eps_, k_min_,
                                   paper_formula_);
  }
  double update(std::span<const double>, const RuleContext& ctx) const override {
    return on_arrival(ctx);
  }

 private:
  double eps_;
  double k_min_;
  bool paper_formula_;
};

// Accept-everything rule; identity element for sequential composition.
class IdentityRule final : public ThresholdRule {
 public:
  std::string name() const override { return "identity"; }
  double update(std::span<const double>, const RuleContext& ctx) const override {
    return ctx.current_tau;
  }
};

// Deliberately broken rule: the threshold equals the smallest priority, so it
// peeks at every priority and nothing is ever retained. Exists so the
// factorization checker's power can be regression-tested.
class PeekRule final : public ThresholdRule {
 public:
  std::string name() const override { return "peek"; }
  double update(std::span<const double> sorted, const RuleContext& ctx) const override {
    return sorted.empty() ? ctx.current_tau : sorted.front();
  }
};

// min / max of two candidate thresholds over the same priorities. min keeps
// the inputs' compatibility degree; max is capped at degree 1.
class CombineRule final : public ThresholdRule {
 public:
  enum class Op { take_min, take_max };
  CombineRule(Op op, RulePtr a, RulePtr b) : op_(op), a_(std::move(a)), b_(std::move(b)) {}
  std::string name() const override {
    return std::string(op_ == Op::take_min ? "min(" : "max(") + a_->name() + "," + b_->name() + ")";
  }
  double initial_tau() const override {
    double ia = a_->initial_tau(), ib = b_->initial_tau();
    return op_ == Op::take_min ? std::min(ia, ib) : std::max(ia, ib);
  }
  bool updates_every_arrival() const override {
    return a_->updates_every_arrival() || b_->updates_every_arrival();
  }
  double update(std::span<const double> sorted, const RuleContext& ctx) const override {
    double ta = a_->update(sorted, ctx);
    double tb = b_->update(sorted, ctx);
    return op_ == Op::take_min ? std::min(ta, tb) : std::max(ta, tb);
  }
  double on_arrival(const RuleContext& ctx) const override {
    double ta = a_->on_arrival(ctx);
    double tb = b_->on_arrival(ctx);
    return op_ == Op::take_min ? std::min(ta, tb) : std::max(ta, tb);
  }
  int degree_cap() const override {
    return op_ == Op::take_min ? detail::combined_cap_min(a_->degree_cap(), b_->degree_cap()) : 1;
  }
  std::size_t natural_capacity() const override {
    std::size_t ca = a_->natural_capacity(), cb = b_->natural_capacity();
    if (op_ == Op::take_max) return (ca == 0 || cb == 0) ? 0 : std::max(ca, cb);
    if (ca == 0) return cb;
    if (cb == 0) return ca;
    return std::min(ca, cb);
  }

 private:
  Op op_;
  RulePtr a_, b_;
};

// Sequential application: rule1 selects survivors, rule2 runs on the
// survivors' priorities. The composite stays strongly substitution
// compatible when both parts are.
class SequentialRule final : public ThresholdRule {
 public:
  SequentialRule(RulePtr first, RulePtr second)
      : first_(std::move(first)), second_(std::move(second)) {}
  std::string name() const override {
    return "seq(" + first_->name() + "," + second_->name() + ")";
  }
  double initial_tau() const override {
    return std::min(first_->initial_tau(), second_->initial_tau());
  }
  bool updates_every_arrival() const override {
    return first_->updates_every_arrival() || second_->updates_every_arrival();
  }
  double update(std::span<const double> sorted, const RuleContext& ctx) const override {
    RuleContext c1 = ctx;
    c1.current_tau = std::min(ctx.current_tau, first_->initial_tau());
    double tau1 = first_->update(sorted, c1);
    auto cut = std::lower_bound(sorted.begin(), sorted.end(), tau1);
    std::span<const double> survivors(sorted.begin(), cut);
    RuleContext c2 = ctx;
    c2.current_tau = std::min(tau1, std::min(ctx.current_tau, second_->initial_tau()));
    return second_->update(survivors, c2);
  }
  int degree_cap() const override {
    return detail::combined_cap_min(first_->degree_cap(), second_->degree_cap());
  }
  std::size_t natural_capacity() const override {
    std::size_t c2 = second_->natural_capacity();
    return c2 != 0 ? c2 : first_->natural_capacity();
  }

 private:
  RulePtr first_, second_;
};

// Parses the rule grammar used by config and CLI:
//   fixed_k:<k> | wegman:<k> | var_adapt:<eps> | identity | peek
//   seq(<r1>,<r2>) | min(<r1>,<r2>) | max(<r1>,<r2>)
RulePtr parse_rule(const std::string& text, bool var_adapt_paper_formula = false);

// Offline application of a rule to a full priority vector: returns the
// threshold the rule yields when all priorities are visible at once.
double apply_rule_offline(const ThresholdRule& rule, std::span<const double> priorities);

}  // namespace athres
