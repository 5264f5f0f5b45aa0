// satforge/nn/layers.hpp
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
#include "satforge/nn/activation.hpp"
#include "satforge/rng.hpp"

namespace satforge::nn {

template <typename T>
struct DenseLayerT {
  Mat<T> weight;        // in_dim x out_dim
  std::vector<T> bias;  // out_dim
  Activation activation = Activation::kLinear;

  DenseLayerT() = default;
  DenseLayerT(std::size_t in_dim, std::size_t out_dim, Activation act)
      : weight(in_dim, out_dim), bias(out_dim, T(0)), activation(act) {}

  std::size_t in_dim() const { return weight.rows; }
  std::size_t out_dim() const { return weight.cols; }

  // Uniform in +-sqrt(6 / (fan_in + fan_out)).
  void init_glorot(Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim()));
    for (T& w : weight.data) w = static_cast<T>(rng.uniform(-limit, limit));
    for (T& b : bias) b = T(0);
  }

  template <typename U>
  DenseLayerT<U> cast() const {
    DenseLayerT<U> out(in_dim(), out_dim(), activation);
    out.weight = weight.template cast<U>();
    out.bias.assign(bias.begin(), bias.end());
    return out;
  }
};

enum class BatchNormMode { kTrain, kEval };

template <typename T>
struct BatchNormCacheT {
  Mat<T> x_hat;                // normalized pre-scale activations
  std::vector<T> inv_std;      // 1 / sqrt(var + eps) used by this pass
  bool train_mode = false;
};

// Normalizes each dimension over the batch, then applies the learned affine
// transform. Train mode uses batch statistics and updates the running ones;
// eval mode is a deterministic function of the running statistics.
template <typename T>
struct BatchNormLayerT {
  std::vector<T> gamma, beta;
  std::vector<T> running_mean, running_var;
  T epsilon = T(1e-5);
  T momentum = T(0.1);  // fraction of the batch statistic folded in per step

  BatchNormLayerT() = default;
  explicit BatchNormLayerT(std::size_t dim)
      : gamma(dim, T(1)), beta(dim, T(0)), running_mean(dim, T(0)), running_var(dim, T(1)) {}

  std::size_t dim() const { return gamma.size(); }

  Mat<T> forward(const Mat<T>& x, BatchNormMode mode, BatchNormCacheT<T>* cache) {
    require(x.cols == dim(), "batchnorm: width mismatch");
    const std::size_t n = x.rows, d = x.cols;
    Mat<T> y(n, d);
    std::vector<T> mean(d), var(d);
    if (mode == BatchNormMode::kTrain) {
      require(n >= 2, "batchnorm: train mode needs batches of >= 2 rows");
      mean = column_means(x);
      for (std::size_t j = 0; j < d; ++j) {
        T acc = T(0);
        for (std::size_t i = 0; i < n; ++i) {
          const T c = x(i, j) - mean[j];
          acc += c * c;
        }
        var[j] = acc / static_cast<T>(n);
      }
      for (std::size_t j = 0; j < d; ++j) {
        // Running variance uses the unbiased estimate.
        const T unbiased = var[j] * static_cast<T>(n) / static_cast<T>(n - 1);
        running_mean[j] = (T(1) - momentum) * running_mean[j] + momentum * mean[j];
        running_var[j] = (T(1) - momentum) * running_var[j] + momentum * unbiased;
      }
    } else {
      mean = running_mean;
      var = running_var;
    }
    std::vector<T> inv_std(d);
    for (std::size_t j = 0; j < d; ++j) inv_std[j] = T(1) / std::sqrt(var[j] + epsilon);
    Mat<T> x_hat(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        x_hat(i, j) = (x(i, j) - mean[j]) * inv_std[j];
        y(i, j) = gamma[j] * x_hat(i, j) + beta[j];
      }
    if (cache) {
      cache->x_hat = std::move(x_hat);
      cache->inv_std = std::move(inv_std);
      cache->train_mode = (mode == BatchNormMode::kTrain);
    }
    return y;
  }

  // Returns dL/dx; accumulates dL/dgamma and dL/dbeta.
  Mat<T> backward(const Mat<T>& dy, const BatchNormCacheT<T>& cache,
                  std::vector<T>& dgamma, std::vector<T>& dbeta) const {
    const std::size_t n = dy.rows, d = dy.cols;
    Mat<T> dx(n, d);
    for (std::size_t j = 0; j < d; ++j) {
      T sum_dy = T(0), sum_dy_xhat = T(0);
      for (std::size_t i = 0; i < n; ++i) {
        sum_dy += dy(i, j);
        sum_dy_xhat += dy(i, j) * cache.x_hat(i, j);
      }
      dgamma[j] += sum_dy_xhat;
      dbeta[j] += sum_dy;
      if (cache.train_mode) {
        const T inv_n = T(1) / static_cast<T>(n);
        for (std::size_t i = 0; i < n; ++i) {
          dx(i, j) = gamma[j] * cache.inv_std[j] *
                     (dy(i, j) - sum_dy * inv_n - cache.x_hat(i, j) * sum_dy_xhat * inv_n);
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) dx(i, j) = gamma[j] * cache.inv_std[j] * dy(i, j);
      }
    }
    return dx;
  }

  template <typename U>
  BatchNormLayerT<U> cast() const {
    BatchNormLayerT<U> out(dim());
    out.gamma.assign(gamma.begin(), gamma.end());
    out.beta.assign(beta.begin(), beta.end());
    out.running_mean.assign(running_mean.begin(), running_mean.end());
    out.running_var.assign(running_var.begin(), running_var.end());
    out.epsilon = static_cast<U>(epsilon);
    out.momentum = static_cast<U>(momentum);
    return out;
  }
};

}  // namespace satforge::nn
