// src/transforms.cpp
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

#include "satforge/backend/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace satforge::backend {

PCAModel pca_fit(const DMatrix& x, std::size_t out_dim) {
  require(out_dim >= 1 && out_dim <= x.cols, "pca_fit: out_dim out of range");
  require(x.rows >= out_dim && x.rows >= 2, "pca_fit: not enough rows");
  PCAModel model;
  model.mean = column_means(x);
  DMatrix cov = covariance(x, model.mean, static_cast<double>(x.rows - 1));
  SymEig eig = sym_eig(cov);
  model.components = DMatrix(out_dim, x.cols);
  model.explained_variance.resize(out_dim);
  const double max_eig = std::max(eig.values.front(), 0.0);
  for (std::size_t r = 0; r < out_dim; ++r) {
    model.explained_variance[r] = std::max(eig.values[r], 0.0);
    // Jacobi returns a full orthonormal basis, so directions past the data
    // rank are still valid orthonormal padding.
    if (eig.values[r] <= 1e-12 * std::max(max_eig, 1e-300)) model.rank_deficient = true;
    for (std::size_t j = 0; j < x.cols; ++j) model.components(r, j) = eig.vectors(r, j);
  }
  return model;
}

DMatrix pca_apply(const PCAModel& model, const DMatrix& x) {
  require(x.cols == model.in_dim(), "pca_apply: width mismatch");
  DMatrix centered = x;
  for (std::size_t i = 0; i < centered.rows; ++i)
    for (std::size_t j = 0; j < centered.cols; ++j) centered(i, j) -= model.mean[j];
  return matmul_a_bt(centered, model.components);
}

DMatrix pca_reconstruct(const PCAModel& model, const DMatrix& y) {
  require(y.cols == model.out_dim(), "pca_reconstruct: width mismatch");
  DMatrix x = matmul(y, model.components);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) x(i, j) += model.mean[j];
  return x;
}

LDAModel lda_fit(const DMatrix& x, const std::vector<int>& labels, std::size_t out_dim) {
  require(x.rows == labels.size(), "lda_fit: label count mismatch");
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < labels.size(); ++i) classes[labels[i]].push_back(i);
  require(classes.size() >= 2, "lda_fit: need at least 2 classes");
  for (const auto& [label, rows] : classes) {
    (void)label;
    require(rows.size() >= 2, "lda_fit: every class needs at least 2 samples");
  }
  require(out_dim >= 1 && out_dim <= std::min(x.cols, classes.size() - 1),
          "lda_fit: out_dim exceeds min(in_dim, classes - 1)");

  const std::size_t d = x.cols;
  const std::size_t n = x.rows;
  LDAModel model;
  model.mean = column_means(x);

  // Within- and between-class scatter.
  DMatrix sw(d, d), sb(d, d);
  for (const auto& [label, rows] : classes) {
    (void)label;
    std::vector<double> class_mean(d, 0.0);
    for (std::size_t r : rows)
      for (std::size_t j = 0; j < d; ++j) class_mean[j] += x(r, j);
    for (double& v : class_mean) v /= static_cast<double>(rows.size());
    for (std::size_t r : rows)
      for (std::size_t i = 0; i < d; ++i) {
        const double ci = x(r, i) - class_mean[i];
        for (std::size_t j = 0; j < d; ++j) sw(i, j) += ci * (x(r, j) - class_mean[j]);
      }
    const double w = static_cast<double>(rows.size()) / static_cast<double>(n);
    for (std::size_t i = 0; i < d; ++i) {
      const double ci = class_mean[i] - model.mean[i];
      for (std::size_t j = 0; j < d; ++j) sb(i, j) += w * ci * (class_mean[j] - model.mean[j]);
    }
  }
  for (auto& v : sw.data) v /= static_cast<double>(n - classes.size());

  SymEig sw_eig = sym_eig(sw);
  const double max_eig = std::max(sw_eig.values.front(), 0.0);
  const double floor = 1e-10 * std::max(max_eig, 1.0);
  if (sw_eig.values.back() <= floor) {
    model.ridge_applied = true;
    for (std::size_t i = 0; i < d; ++i) sw(i, i) += floor;
    sw_eig = sym_eig(sw);
  }
  std::vector<double> inv_sqrt(d);
  for (std::size_t i = 0; i < d; ++i) inv_sqrt[i] = 1.0 / std::sqrt(sw_eig.values[i]);
  DMatrix whiten = sym_function(sw_eig, inv_sqrt);

  DMatrix sb_star = matmul(matmul(whiten, sb), whiten);
  SymEig sb_eig = sym_eig(sb_star);
  DMatrix top(out_dim, d);
  for (std::size_t r = 0; r < out_dim; ++r)
    for (std::size_t j = 0; j < d; ++j) top(r, j) = sb_eig.vectors(r, j);
  model.projection = matmul(top, whiten);
  return model;
}

DMatrix lda_apply(const LDAModel& model, const DMatrix& x) {
  require(x.cols == model.in_dim(), "lda_apply: width mismatch");
  DMatrix centered = x;
  for (std::size_t i = 0; i < centered.rows; ++i)
    for (std::size_t j = 0; j < centered.cols; ++j) centered(i, j) -= model.mean[j];
  return matmul_a_bt(centered, model.projection);
}

}  // namespace satforge::backend
