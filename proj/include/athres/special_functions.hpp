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

#include <cstddef>
#include <span>

namespace athres::stats {

// Regularized incomplete beta I_x(a, b); the cdf of Beta(a, b) at x.
double beta_cdf(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

// Chi-square cdf and quantile with df degrees of freedom.
double chi2_cdf(double x, double df);
double chi2_quantile(double p, double df);

// Standard normal cdf.
double normal_cdf(double z);

// One-sample Kolmogorov-Smirnov statistic of `sorted` against the cdf values
// `model_cdf[i]` evaluated at sorted[i].
double ks_statistic(std::span<const double> model_cdf_at_sorted);

// Asymptotic one-sample KS critical value at significance alpha.
double ks_critical(double alpha, std::size_t n);

// Two-sample chi-square statistic over aligned count vectors (equal trial
// budgets not required). Cells where both counts are zero are skipped.
double chi2_two_sample(std::span<const double> a, std::span<const double> b, std::size_t* df_out);

}  // namespace athres::stats
