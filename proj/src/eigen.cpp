// src/eigen.cpp
//
// Copyright 2026  The SATForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "satforge/backend/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace satforge::backend {

SymEig sym_eig(const DMatrix& a, double tol, int max_sweeps) {
  require(a.rows == a.cols, "sym_eig: matrix must be square");
  const std::size_t n = a.rows;
  DMatrix m = a;
  // Symmetrize defensively; moment estimates can carry roundoff skew.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
  DMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(m(i, i)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(m(i, j)));
  if (scale == 0.0) scale = 1.0;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::fabs(m(i, j)));
    if (off <= tol * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymEig eig;
  eig.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) eig.values[i] = m(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return eig.values[x] > eig.values[y]; });
  SymEig sorted;
  sorted.values.resize(n);
  sorted.vectors = DMatrix(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    sorted.values[r] = eig.values[order[r]];
    for (std::size_t k = 0; k < n; ++k) sorted.vectors(r, k) = v(k, order[r]);
  }
  return sorted;
}

DMatrix sym_function(const SymEig& eig, const std::vector<double>& transformed_values) {
  const std::size_t n = eig.values.size();
  require(transformed_values.size() == n, "sym_function: value count mismatch");
  DMatrix out(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const double f = transformed_values[r];
    if (f == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = eig.vectors(r, i) * f;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * eig.vectors(r, j);
    }
  }
  return out;
}

DMatrix sym_inverse(const DMatrix& a) {
  SymEig eig = sym_eig(a);
  std::vector<double> inv(eig.values.size());
  for (std::size_t i = 0; i < inv.size(); ++i) {
    require_numeric(eig.values[i] > 0.0, "sym_inverse: matrix is not positive definite");
    inv[i] = 1.0 / eig.values[i];
  }
  return sym_function(eig, inv);
}

double sym_logdet(const DMatrix& a) {
  SymEig eig = sym_eig(a);
  double logdet = 0.0;
  for (double v : eig.values) {
    require_numeric(v > 0.0, "sym_logdet: matrix is not positive definite");
    logdet += std::log(v);
  }
  return logdet;
}

DMatrix covariance(const DMatrix& x, const std::vector<double>& mean, double denom) {
  require(x.cols == mean.size(), "covariance: mean width mismatch");
  require(denom > 0.0, "covariance: non-positive denominator");
  const std::size_t d = x.cols;
  DMatrix cov(d, d);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double* row = x.row_ptr(r);
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = row[i] - mean[i];
      for (std::size_t j = i; j < d; ++j) cov(i, j) += ci * (row[j] - mean[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      cov(i, j) /= denom;
      cov(j, i) = cov(i, j);
    }
  return cov;
}

}  // namespace satforge::backend
