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

#include <cmath>
#include <span>
#include <vector>

#include "athres/estimators.hpp"
#include "athres/linalg.hpp"

namespace athres {

// Squared loss on the scalar payload: l(x, theta) = (x - theta)^2. The
// minimizer of the weighted objective is the weighted mean.
struct SquaredLoss {
  std::size_t dim() const { return 1; }
  double value(const WeightedItem& item, const linalg::Vec& theta) const {
    double d = item.x() - theta[0];
    return d * d;
  }
  void add_gradient(const WeightedItem& item, const linalg::Vec& theta, double c,
                    linalg::Vec& g) const {
    g[0] += c * 2.0 * (theta[0] - item.x());
  }
  void add_hessian(const WeightedItem&, const linalg::Vec&, double c, linalg::Mat& h) const {
    h.at(0, 0) += 2.0 * c;
  }
};

// Logistic log-loss. Payload layout: value = [y, x_1, ..., x_d] with y in
// {0,1}; theta has dimension d (no intercept unless a constant covariate is
// included).
struct LogisticLoss {
  std::size_t covariates;

  explicit LogisticLoss(std::size_t d) : covariates(d) {}
  std::size_t dim() const { return covariates; }

  static double margin(const WeightedItem& item, const linalg::Vec& theta) {
    double z = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) z += theta[j] * item.value[j + 1];
    return z;
  }

  double value(const WeightedItem& item, const linalg::Vec& theta) const {
    double z = margin(item, theta);
    double y = item.value[0];
    // log(1 + e^z) - y z, computed stably on both tails.
    double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return softplus - y * z;
  }

  void add_gradient(const WeightedItem& item, const linalg::Vec& theta, double c,
                    linalg::Vec& g) const {
    double z = margin(item, theta);
    double p = 1.0 / (1.0 + std::exp(-z));
    double d = c * (p - item.value[0]);
    for (std::size_t j = 0; j < theta.size(); ++j) g[j] += d * item.value[j + 1];
  }

  void add_hessian(const WeightedItem& item, const linalg::Vec& theta, double c,
                   linalg::Mat& h) const {
    double z = margin(item, theta);
    double p = 1.0 / (1.0 + std::exp(-z));
    double d = c * p * (1.0 - p);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      for (std::size_t j = 0; j < theta.size(); ++j) {
        h.at(i, j) += d * item.value[i + 1] * item.value[j + 1];
      }
    }
  }
};

struct FitOptions {
  int max_iters = 500;
  double grad_tol = 1e-8;
  double condition_limit = 1e8;
  bool compute_covariance = true;
};

struct FitResult {
  linalg::Vec theta;
  linalg::Mat covariance;  // sandwich H^-1 V H^-1 at the optimum
  bool converged = false;
  int iterations = 0;
};

// Minimizes sum_i c_i * l(item_i, theta). Damped Newton steps while the
// weighted Hessian is well conditioned, otherwise gradient descent; both with
// backtracking line search. The covariance is the sandwich estimate with
// V the weighted gradient outer-product sum.
template <typename Loss>
FitResult fit_weighted_loss(std::span<const WeightedItem> items, std::span<const double> coeffs,
                            const Loss& loss, linalg::Vec theta0 = {},
                            const FitOptions& options = {}) {
  std::size_t d = loss.dim();
  FitResult result;
  result.theta = theta0.empty() ? linalg::Vec(d, 0.0) : std::move(theta0);

  auto objective = [&](const linalg::Vec& theta) {
    double v = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) v += coeffs[i] * loss.value(items[i], theta);
    return v;
  };

  linalg::Vec g(d), step(d), candidate(d);
  double current = objective(result.theta);
  for (int iter = 0; iter < options.max_iters; ++iter) {
    result.iterations = iter + 1;
    g.assign(d, 0.0);
    linalg::Mat h(d);
    for (std::size_t i = 0; i < items.size(); ++i) {
      loss.add_gradient(items[i], result.theta, coeffs[i], g);
      loss.add_hessian(items[i], result.theta, coeffs[i], h);
    }
    if (linalg::norm2(g) < options.grad_tol) {
      result.converged = true;
      break;
    }
    bool newton = linalg::condition_number(h) < options.condition_limit &&
                  linalg::cholesky_solve(h, g, step);
    if (!newton) step = g;  // plain gradient direction
    double scale = 1.0;
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      for (std::size_t j = 0; j < d; ++j) candidate[j] = result.theta[j] - scale * step[j];
      double value = objective(candidate);
      if (value < current) {
        result.theta = candidate;
        current = value;
        moved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!moved) {
      // No descent at float resolution; accept the iterate as converged-ish
      // if the gradient is already tiny relative to the objective scale.
      result.converged = linalg::norm2(g) < 1e-6 * (1.0 + std::fabs(current));
      break;
    }
  }

  if (options.compute_covariance) {
    linalg::Mat h(d), v(d);
    linalg::Vec gi(d);
    for (std::size_t i = 0; i < items.size(); ++i) {
      loss.add_hessian(items[i], result.theta, coeffs[i], h);
      gi.assign(d, 0.0);
      loss.add_gradient(items[i], result.theta, coeffs[i], gi);
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) v.at(r, c) += gi[r] * gi[c];
      }
    }
    linalg::Mat h_inv;
    if (linalg::spd_inverse(h, h_inv)) {
      result.covariance = linalg::multiply(linalg::multiply(h_inv, v), h_inv);
      // Clean up asymmetry from rounding.
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = r + 1; c < d; ++c) {
          double m = 0.5 * (result.covariance.at(r, c) + result.covariance.at(c, r));
          result.covariance.at(r, c) = m;
          result.covariance.at(c, r) = m;
        }
      }
    } else {
      result.covariance = linalg::Mat(d);
    }
  }
  return result;
}

// Spec-shaped entry point: inverse-probability weights w_i / F_i(tau_i) from
// the sample itself. Returns the fitted parameters with the sandwich
// variance; a non-convergent fit comes back flagged, not thrown.
template <typename Loss>
Estimate weighted_loss_fit(const Sample& sample, const Loss& loss, linalg::Vec theta0 = {},
                           const FitOptions& options = {}) {
  require_degree(sample, 1);
  std::vector<WeightedItem> items;
  std::vector<double> coeffs;
  items.reserve(sample.items.size());
  coeffs.reserve(sample.items.size());
  for (const SampleItem& si : sample.items) {
    items.push_back(si.item);
    coeffs.push_back(si.item.weight / inclusion_or_throw(si));
  }
  FitResult fit = fit_weighted_loss<Loss>(items, coeffs, loss, std::move(theta0), options);
  Estimate e;
  e.value = fit.theta;
  e.variance = fit.covariance.a;
  e.degree_used = 1;
  e.n_effective = sample.size();
  e.converged = fit.converged;
  return e;
}

}  // namespace athres
