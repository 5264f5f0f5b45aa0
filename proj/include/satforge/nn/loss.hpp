// satforge/nn/loss.hpp
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

#include <cmath>
#include <cstddef>
#include <vector>

#include "satforge/matrix.hpp"

namespace satforge::nn {

// Row-wise softmax, numerically stabilized by the row maximum.
template <typename T>
Mat<T> softmax(const Mat<T>& logits) {
  Mat<T> out(logits.rows, logits.cols);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const T* row = logits.row_ptr(i);
    T* orow = out.row_ptr(i);
    T max = row[0];
    for (std::size_t j = 1; j < logits.cols; ++j) max = std::max(max, row[j]);
    T sum = T(0);
    for (std::size_t j = 0; j < logits.cols; ++j) {
      orow[j] = std::exp(row[j] - max);
      sum += orow[j];
    }
    for (std::size_t j = 0; j < logits.cols; ++j) orow[j] /= sum;
  }
  return out;
}

template <typename T>
struct LossResultT {
  T loss = T(0);           // mean negative log-likelihood over rows
  Mat<T> d_logits;         // gradient of the mean loss w.r.t. logits
};

// Mean cross-entropy over the batch. Gradient rows each sum to zero.
template <typename T>
LossResultT<T> cross_entropy_loss(const Mat<T>& logits, const std::vector<int>& labels) {
  require(logits.rows == labels.size(), "cross_entropy_loss: label count mismatch");
  require(logits.rows > 0, "cross_entropy_loss: empty batch");
  for (int lab : labels)
    require(lab >= 0 && static_cast<std::size_t>(lab) < logits.cols,
            "cross_entropy_loss: label " + std::to_string(lab) + " out of range");
  LossResultT<T> result;
  result.d_logits = softmax(logits);
  const T inv_n = T(1) / static_cast<T>(logits.rows);
  T loss = T(0);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    T* grow = result.d_logits.row_ptr(i);
    const std::size_t lab = static_cast<std::size_t>(labels[i]);
    // -log p can be computed from the already-normalized probability; clamp
    // away exact zeros produced by underflow.
    const T p = std::max(grow[lab], std::numeric_limits<T>::min());
    loss -= std::log(p);
    grow[lab] -= T(1);
    for (std::size_t j = 0; j < logits.cols; ++j) grow[j] *= inv_n;
  }
  result.loss = loss * inv_n;
  require_numeric(std::isfinite(static_cast<double>(result.loss)),
                  "cross_entropy_loss: non-finite loss");
  return result;
}

using LossResult = LossResultT<float>;

}  // namespace satforge::nn
