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

#include "athres/logistic_sim.hpp"

#include <algorithm>
#include <cmath>

#include "athres/fast_sampler.hpp"
#include "athres/linalg.hpp"
#include "athres/rng.hpp"

namespace athres {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct Row {
  double y, x1, x2;
  double offset;  // fixed additive term in the logit
};

// Newton fit of the weighted logistic loss with per-row offsets over two
// coefficients. Weights are normalized to sum 1 so gradient tolerances are
// scale free. Returns false when it fails to converge.
bool fit_rows(const std::vector<Row>& rows, const std::vector<double>& weights,
              linalg::Vec& theta) {
  double wsum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) wsum += weights[i];
  if (!(wsum > 0.0) || rows.empty()) return false;
  double b1 = theta[0], b2 = theta[1];
  for (int iter = 0; iter < 60; ++iter) {
    double g1 = 0, g2 = 0, h11 = 0, h12 = 0, h22 = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      double c = weights[i] / wsum;
      double p = logistic(b1 * r.x1 + b2 * r.x2 + r.offset);
      double d = c * (p - r.y);
      g1 += d * r.x1;
      g2 += d * r.x2;
      double q = c * p * (1.0 - p);
      h11 += q * r.x1 * r.x1;
      h12 += q * r.x1 * r.x2;
      h22 += q * r.x2 * r.x2;
    }
    double gnorm = std::sqrt(g1 * g1 + g2 * g2);
    if (gnorm < 1e-9) {
      theta[0] = b1;
      theta[1] = b2;
      return true;
    }
    double det = h11 * h22 - h12 * h12;
    double s1, s2;
    if (det > 1e-12 * (h11 + h22) * (h11 + h22)) {
      s1 = (h22 * g1 - h12 * g2) / det;
      s2 = (h11 * g2 - h12 * g1) / det;
    } else {
      s1 = g1;
      s2 = g2;
    }
    double step_norm = std::sqrt(s1 * s1 + s2 * s2);
    if (step_norm > 5.0) {
      s1 *= 5.0 / step_norm;
      s2 *= 5.0 / step_norm;
    }
    b1 -= s1;
    b2 -= s2;
    if (!std::isfinite(b1) || !std::isfinite(b2)) return false;
  }
  theta[0] = b1;
  theta[1] = b2;
  return false;
}

struct Point {
  double t, x1, x2, y;
};

}  // namespace

LogisticSimResult run_logistic_sim(const LogisticSimSpec& spec) {
  if (spec.n_points <= spec.init_items || spec.batch < 1 || spec.k < 2) {
    throw_error(errc::invalid_sample_size, "logistic sim needs n > init_items, batch >= 1, k >= 2");
  }
  if (!(spec.c > 0.0)) throw_error(errc::parse_error, "coefficient scale c must be positive");

  LogisticSimResult result;
  Rng rng(spec.seed);

  // Conditioned homogeneous Poisson arrivals = sorted uniforms.
  std::vector<double> times(spec.n_points);
  for (double& t : times) t = rng.next_unit_open();
  std::sort(times.begin(), times.end());

  std::vector<Point> points(spec.n_points);
  std::vector<double> gweights(spec.n_points);
  double opt_err = 0.0;
  for (std::size_t i = 0; i < spec.n_points; ++i) {
    double t = times[i];
    double x1 = rng.next_gaussian();
    double x2 = rng.next_gaussian();
    double p = logistic(spec.c * (std::sin(M_PI * t) * x1 + std::cos(M_PI * t) * x2));
    double y = rng.next_unit_open() < p ? 1.0 : 0.0;
    points[i] = Point{t, x1, x2, y};
    gweights[i] = std::exp(spec.decay * t);
    opt_err += std::min(p, 1.0 - p);
  }
  result.optimal_error_estimate = opt_err / static_cast<double>(spec.n_points);

  // Both samplers share the per-arrival uniform and the internal seed
  // (common random numbers), so the design comparison is not clouded by
  // independent sampling noise; each remains marginally a correct priority
  // sample of its own design.
  FastSampler::Config sc;
  sc.k = static_cast<int>(spec.k);
  sc.seed = mix64(spec.seed ^ 0xa5a5a5a5ULL);
  FastSampler decay_sampler(sc);
  FastSampler cc_sampler(sc);
  Rng arrival_rng(mix64(spec.seed ^ 0x5a5a5a5aULL));

  // Payload layout: [y, x1, x2, pilot margin at arrival]. The margin is
  // written once when the item is offered and never touched again, like the
  // priorities themselves.
  WeightedItem scratch;
  scratch.value.resize(4);

  linalg::Vec theta_decay(2, 0.0), theta_cc(2, 0.0), theta_full(2, 0.0);

  auto add_point = [&](std::size_t i, const linalg::Vec& pilot_theta) {
    const Point& pt = points[i];
    scratch.value[0] = pt.y;
    scratch.value[1] = pt.x1;
    scratch.value[2] = pt.x2;
    scratch.arrival_time = pt.t;
    double u = arrival_rng.next_unit_open();

    double pilot_margin = spec.pilot_override
                              ? std::log(*spec.pilot_override / (1.0 - *spec.pilot_override))
                              : pilot_theta[0] * pt.x1 + pilot_theta[1] * pt.x2;
    scratch.value[3] = pilot_margin;

    scratch.weight = gweights[i];
    decay_sampler.add_with_uniform(scratch, u);

    double p_tilde = logistic(pilot_margin);
    p_tilde = std::min(1.0 - spec.surprise_floor, std::max(spec.surprise_floor, p_tilde));
    double surprise = pt.y > 0.5 ? 1.0 - p_tilde : p_tilde;
    scratch.weight = gweights[i] * surprise;
    cc_sampler.add_with_uniform(scratch, u);
  };

  auto refit_decay = [&](linalg::Vec& theta) {
    std::vector<Row> rows;
    std::vector<double> ws;
    rows.reserve(spec.k + 8);
    ws.reserve(spec.k + 8);
    decay_sampler.for_each_retained([&](const WeightedItem& item, double inclusion) {
      rows.push_back(Row{item.value[0], item.value[1], item.value[2], 0.0});
      ws.push_back(std::exp(spec.decay * *item.arrival_time) / inclusion);
    });
    linalg::Vec candidate = theta;
    if (fit_rows(rows, ws, candidate)) {
      theta = candidate;
    } else {
      ++result.nonconvergent_refits;
    }
  };

  auto refit_cc = [&](linalg::Vec& theta) {
    std::vector<Row> rows;
    std::vector<double> ws;
    rows.reserve(spec.k + 8);
    ws.reserve(spec.k + 8);
    double tau = cc_sampler.tau();
    cc_sampler.for_each_retained([&](const WeightedItem& item, double inclusion) {
      if (spec.cc_refit == LogisticSimSpec::CaseControlRefit::inverse_probability) {
        rows.push_back(Row{item.value[0], item.value[1], item.value[2], 0.0});
        ws.push_back(std::exp(spec.decay * *item.arrival_time) / inclusion);
        return;
      }
      // Conditional refit: the retained sample's y-law is the population law
      // tilted by the selection odds
      //   log F(g * surprise(y=1) * tau) - log F(g * surprise(y=0) * tau),
      // which enters the logit as a fixed per-item offset. For items below
      // the certainty region this is exactly minus the pilot margin.
      double g = std::exp(spec.decay * *item.arrival_time);
      double p_tilde = logistic(item.value[3]);
      p_tilde = std::min(1.0 - spec.surprise_floor, std::max(spec.surprise_floor, p_tilde));
      double f1 = std::min(1.0, g * (1.0 - p_tilde) * tau);
      double f0 = std::min(1.0, g * p_tilde * tau);
      rows.push_back(Row{item.value[0], item.value[1], item.value[2], std::log(f1 / f0)});
      ws.push_back(1.0);
    });
    linalg::Vec candidate = theta;
    if (fit_rows(rows, ws, candidate)) {
      theta = candidate;
    } else {
      ++result.nonconvergent_refits;
    }
  };

  auto full_fit = [&](std::size_t count, linalg::Vec& theta) {
    std::vector<Row> rows(count);
    for (std::size_t i = 0; i < count; ++i) {
      rows[i] = Row{points[i].y, points[i].x1, points[i].x2, 0.0};
    }
    std::vector<double> ws(gweights.begin(), gweights.begin() + static_cast<long>(count));
    fit_rows(rows, ws, theta);
  };

  // Initialize coefficients on the first init_items items.
  for (std::size_t i = 0; i < spec.init_items; ++i) add_point(i, theta_cc);
  full_fit(spec.init_items, theta_full);
  theta_decay = theta_full;
  theta_cc = theta_full;

  std::size_t total_batches = (spec.n_points - spec.init_items + spec.batch - 1) / spec.batch;
  std::size_t checkpoint_every =
      std::max<std::size_t>(1, total_batches / std::max<std::size_t>(1, spec.checkpoints));

  Accumulator err_decay_acc, err_cc_acc;
  std::size_t next = spec.init_items;
  std::size_t batch_index = 0;
  while (next < spec.n_points) {
    std::size_t end = std::min(next + spec.batch, spec.n_points);
    for (std::size_t i = next; i < end; ++i) add_point(i, theta_cc);
    next = end;
    refit_decay(theta_decay);
    refit_cc(theta_cc);
    ++batch_index;

    if (batch_index % checkpoint_every == 0 || next >= spec.n_points) {
      full_fit(next, theta_full);
      double d1 = theta_decay[0] - theta_full[0], d2 = theta_decay[1] - theta_full[1];
      double c1 = theta_cc[0] - theta_full[0], c2 = theta_cc[1] - theta_full[1];
      double ed = d1 * d1 + d2 * d2;
      double ec = c1 * c1 + c2 * c2;
      err_decay_acc.push(ed);
      err_cc_acc.push(ec);
      result.series.push_back({points[next - 1].t, ed, ec});
    }
  }

  result.decay_only_l2 = err_decay_acc.mean;
  result.case_control_l2 = err_cc_acc.mean;
  result.error_ratio =
      result.case_control_l2 > 0.0 ? result.decay_only_l2 / result.case_control_l2 : 0.0;
  return result;
}

}  // namespace athres
