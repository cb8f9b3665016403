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
#include <cstddef>
#include <vector>

namespace athres::linalg {

using Vec = std::vector<double>;

// Small dense symmetric matrices, row-major. The fits here are a handful of
// dimensions, so simplicity beats sophistication.
struct Mat {
  std::size_t n = 0;
  std::vector<double> a;

  Mat() = default;
  explicit Mat(std::size_t n_) : n(n_), a(n_ * n_, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

// Jacobi eigenvalue iteration for symmetric matrices; returns eigenvalues.
inline Vec symmetric_eigenvalues(Mat m) {
  std::size_t n = m.n;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += m.at(i, j) * m.at(i, j);
    }
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (m.at(p, q) == 0.0) continue;
        double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * m.at(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          double mip = m.at(i, p), miq = m.at(i, q);
          m.at(i, p) = c * mip - s * miq;
          m.at(i, q) = s * mip + c * miq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double mpi = m.at(p, i), mqi = m.at(q, i);
          m.at(p, i) = c * mpi - s * mqi;
          m.at(q, i) = s * mpi + c * mqi;
        }
      }
    }
  }
  Vec eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = m.at(i, i);
  return eig;
}

// Condition number of a symmetric matrix (infinite when singular).
inline double condition_number(const Mat& m) {
  Vec eig = symmetric_eigenvalues(m);
  double lo = std::fabs(eig[0]), hi = std::fabs(eig[0]);
  for (double e : eig) {
    lo = std::min(lo, std::fabs(e));
    hi = std::max(hi, std::fabs(e));
  }
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

inline bool is_symmetric_psd(const Mat& m, double tol) {
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = i + 1; j < m.n; ++j) {
      if (std::fabs(m.at(i, j) - m.at(j, i)) > tol) return false;
    }
  }
  Vec eig = symmetric_eigenvalues(m);
  for (double e : eig) {
    if (e < -tol) return false;
  }
  return true;
}

// Solves A x = b for symmetric positive definite A via Cholesky. Returns
// false when the factorization breaks down.
inline bool cholesky_solve(Mat a, Vec b, Vec& x) {
  std::size_t n = a.n;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a.at(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a.at(j, k) * a.at(j, k);
    if (!(d > 0.0)) return false;
    a.at(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a.at(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a.at(i, k) * a.at(j, k);
      a.at(i, j) = s / a.at(j, j);
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a.at(i, k) * b[k];
    b[i] = s / a.at(i, i);
  }
  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a.at(k, ii) * x[k];
    x[ii] = s / a.at(ii, ii);
  }
  return true;
}

// Inverse of a symmetric positive definite matrix by column solves.
inline bool spd_inverse(const Mat& a, Mat& inv) {
  inv = Mat(a.n);
  Vec e(a.n, 0.0), col;
  for (std::size_t j = 0; j < a.n; ++j) {
    e.assign(a.n, 0.0);
    e[j] = 1.0;
    if (!cholesky_solve(a, e, col)) return false;
    for (std::size_t i = 0; i < a.n; ++i) inv.at(i, j) = col[i];
  }
  // Symmetrize against rounding.
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = i + 1; j < a.n; ++j) {
      double v = 0.5 * (inv.at(i, j) + inv.at(j, i));
      inv.at(i, j) = v;
      inv.at(j, i) = v;
    }
  }
  return true;
}

inline Mat multiply(const Mat& a, const Mat& b) {
  Mat out(a.n);
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t k = 0; k < a.n; ++k) {
      double v = a.at(i, k);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < a.n; ++j) out.at(i, j) += v * b.at(k, j);
    }
  }
  return out;
}

}  // namespace athres::linalg
