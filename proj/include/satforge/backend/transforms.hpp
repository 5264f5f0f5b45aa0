// satforge/backend/transforms.hpp
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

#pragma once

#include <cstddef>
#include <vector>

#include "satforge/backend/eigen.hpp"

namespace satforge::backend {

struct PCAModel {
  std::vector<double> mean;
  DMatrix components;  // out_dim x in_dim, orthonormal rows, by variance
  std::vector<double> explained_variance;
  bool rank_deficient = false;

  std::size_t in_dim() const { return components.cols; }
  std::size_t out_dim() const { return components.rows; }
};

PCAModel pca_fit(const DMatrix& x, std::size_t out_dim);
DMatrix pca_apply(const PCAModel& model, const DMatrix& x);
// Maps projected coordinates back; exact when out_dim == in_dim.
DMatrix pca_reconstruct(const PCAModel& model, const DMatrix& y);

struct LDAModel {
  std::vector<double> mean;
  DMatrix projection;  // out_dim x in_dim
  bool ridge_applied = false;

  std::size_t in_dim() const { return projection.cols; }
  std::size_t out_dim() const { return projection.rows; }
};

// Maximizes between/within scatter ratio; solved by whitening the within
// scatter and diagonalizing the whitened between scatter.
LDAModel lda_fit(const DMatrix& x, const std::vector<int>& labels, std::size_t out_dim);
DMatrix lda_apply(const LDAModel& model, const DMatrix& x);

}  // namespace satforge::backend
