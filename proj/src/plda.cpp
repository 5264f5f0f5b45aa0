// src/plda.cpp
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

#include "satforge/backend/plda.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace satforge::backend {

namespace {

DMatrix psd_project(const DMatrix& a) {
  SymEig eig = sym_eig(a);
  std::vector<double> clipped(eig.values.size());
  for (std::size_t i = 0; i < clipped.size(); ++i) clipped[i] = std::max(eig.values[i], 0.0);
  return sym_function(eig, clipped);
}

void finalize_scoring_terms(PLDAModel& model) {
  const std::size_t d = model.dim();
  DMatrix total = model.within;   // B + W
  DMatrix same = model.within;    // 2B + W
  for (std::size_t i = 0; i < d * d; ++i) {
    total.data[i] += model.between.data[i];
    same.data[i] += 2.0 * model.between.data[i];
  }
  model.inv_within = sym_inverse(model.within);
  model.inv_total = sym_inverse(total);
  model.inv_same = sym_inverse(same);
  model.logdet_within = sym_logdet(model.within);
  model.logdet_total = sym_logdet(total);
  model.logdet_same = sym_logdet(same);
}

}  // namespace

PLDAModel plda_fit(const DMatrix& x, const std::vector<int>& labels) {
  require(x.rows == labels.size(), "plda_fit: label count mismatch");
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < labels.size(); ++i) classes[labels[i]].push_back(i);

  const std::size_t d = x.cols;
  PLDAModel model;
  model.mu = column_means(x);

  // Within-class scatter pools classes with at least two samples.
  DMatrix within(d, d);
  std::size_t within_dof = 0;
  std::vector<std::vector<double>> class_means;
  std::vector<std::size_t> class_sizes;
  for (const auto& [label, rows] : classes) {
    (void)label;
    if (rows.size() < 2) {
      ++model.dropped_singleton_classes;
      continue;
    }
    std::vector<double> mean(d, 0.0);
    for (std::size_t r : rows)
      for (std::size_t j = 0; j < d; ++j) mean[j] += x(r, j);
    for (double& v : mean) v /= static_cast<double>(rows.size());
    for (std::size_t r : rows)
      for (std::size_t i = 0; i < d; ++i) {
        const double ci = x(r, i) - mean[i];
        for (std::size_t j = 0; j < d; ++j) within(i, j) += ci * (x(r, j) - mean[j]);
      }
    within_dof += rows.size() - 1;
    class_means.push_back(std::move(mean));
    class_sizes.push_back(rows.size());
  }
  require(class_means.size() >= 2, "plda_fit: need at least 2 classes with >= 2 samples");
  for (double& v : within.data) v /= static_cast<double>(within_dof);

  // Covariance of the class means carries between + within/n; subtract the
  // average correction and project back to PSD.
  const std::size_t c = class_means.size();
  DMatrix means(c, d);
  for (std::size_t r = 0; r < c; ++r)
    for (std::size_t j = 0; j < d; ++j) means(r, j) = class_means[r][j];
  std::vector<double> grand = column_means(means);
  DMatrix raw_between = covariance(means, grand, static_cast<double>(c - 1));
  double mean_inv_n = 0.0;
  for (std::size_t n : class_sizes) mean_inv_n += 1.0 / static_cast<double>(n);
  mean_inv_n /= static_cast<double>(c);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) raw_between(i, j) -= mean_inv_n * within(i, j);
  model.between = psd_project(raw_between);

  // Within must be positive definite for scoring.
  SymEig weig = sym_eig(within);
  const double floor = 1e-10 * std::max(weig.values.front(), 1.0);
  if (weig.values.back() <= floor) {
    model.ridge_applied = true;
    for (std::size_t i = 0; i < d; ++i) within(i, i) += floor;
  }
  model.within = within;
  finalize_scoring_terms(model);
  return model;
}

PLDAModel make_plda(std::vector<double> mu, DMatrix between, DMatrix within) {
  PLDAModel model;
  model.mu = std::move(mu);
  model.between = std::move(between);
  model.within = std::move(within);
  require(model.between.rows == model.dim() && model.within.rows == model.dim(),
          "make_plda: dimension mismatch");
  finalize_scoring_terms(model);
  return model;
}

namespace {

double quad_form(const DMatrix& a, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double* row = a.row_ptr(i);
    double inner = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) inner += row[j] * v[j];
    acc += v[i] * inner;
  }
  return acc;
}

}  // namespace

/*
  Under the two-covariance model the joint of an enroll/test pair is
  Gaussian with block covariance [[B+W, B], [B, B+W]] when the pair shares
  a class and [[B+W, 0], [0, B+W]] otherwise. Rotating to the sum and
  difference coordinates p = (u+v)/sqrt(2), q = (u-v)/sqrt(2) (u, v are the
  centered vectors) block-diagonalizes both hypotheses:

    same:        p ~ N(0, 2B+W),   q ~ N(0, W)
    different:   p ~ N(0, B+W),    q ~ N(0, B+W)

  so the log-likelihood ratio needs only the three precomputed inverses and
  log-determinants. The expression is symmetric in (enroll, test), and with
  B = 0 both hypotheses coincide, giving a ratio of exactly zero.
*/
double plda_score(const PLDAModel& model, const std::vector<double>& enroll,
                  const std::vector<double>& test) {
  const std::size_t d = model.dim();
  require(enroll.size() == d && test.size() == d, "plda_score: dimension mismatch");
  const double inv_sqrt2 = 0.7071067811865475244;
  std::vector<double> p(d), q(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double u = enroll[j] - model.mu[j];
    const double v = test[j] - model.mu[j];
    p[j] = (u + v) * inv_sqrt2;
    q[j] = (u - v) * inv_sqrt2;
  }
  const double quad_same = quad_form(model.inv_same, p) + quad_form(model.inv_within, q);
  const double quad_diff = quad_form(model.inv_total, p) + quad_form(model.inv_total, q);
  const double logdet_same = model.logdet_same + model.logdet_within;
  const double logdet_diff = 2.0 * model.logdet_total;
  return -0.5 * (quad_same - quad_diff) - 0.5 * (logdet_same - logdet_diff);
}

}  // namespace satforge::backend
