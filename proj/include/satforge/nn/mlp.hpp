// satforge/nn/mlp.hpp
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
#include <optional>
#include <string>
#include <vector>

#include "satforge/matrix.hpp"
#include "satforge/nn/layers.hpp"
#include "satforge/tensor.hpp"

namespace satforge::nn {

// Conditioning hook. Site 0 transforms the input features; site l (l >= 1)
// transforms the activation output of hidden layer l before it feeds the
// next layer. A transform must pass x through unchanged at sites it does
// not own, and backward calls mirror forward calls in reverse order.
template <typename T>
class SiteTransformT {
 public:
  virtual ~SiteTransformT() = default;
  virtual Mat<T> forward(std::size_t site, const Mat<T>& x) = 0;
  // Given dL/d(output at site), returns dL/d(input at site) and accumulates
  // any internal parameter gradients.
  virtual Mat<T> backward(std::size_t site, const Mat<T>& d_out) = 0;
};

using SiteTransform = SiteTransformT<float>;

template <typename T>
struct LayerCacheT {
  Mat<T> input;   // what fed the affine transform
  Mat<T> z;       // pre-activation (post batch norm)
  Mat<T> h;       // activation output, before any site transform
  BatchNormCacheT<T> bn;
};

template <typename T>
struct ForwardCacheT {
  std::vector<LayerCacheT<T>> layers;
  std::size_t batch_rows = 0;
  bool valid = false;
};

struct MlpConfig {
  std::size_t input_dim = 20;
  std::vector<std::size_t> hidden_dims = {64, 64, 64};
  std::size_t num_classes = 24;
  Activation hidden_activation = Activation::kRelu;
  bool use_batchnorm = true;

  std::size_t num_layers() const { return hidden_dims.size() + 1; }
};

// Preset mirroring the large reference acoustic model (six 2048-unit
// layers over 40-dim features with 11 frames of context); the desk-scale
// default above is what tests and experiments run with.
inline MlpConfig reference_mlp_config(std::size_t num_classes) {
  MlpConfig cfg;
  cfg.input_dim = 440;
  cfg.hidden_dims = std::vector<std::size_t>(6, 2048);
  cfg.num_classes = num_classes;
  return cfg;
}

// Dense frame classifier: hidden layers are affine -> batch norm -> act,
// the final layer emits linear logits.
template <typename T>
class MLPT {
 public:
  struct Block {
    DenseLayerT<T> dense;
    std::optional<BatchNormLayerT<T>> bn;
    bool frozen = false;
    // gradient buffers
    Mat<T> d_weight;
    std::vector<T> d_bias, d_gamma, d_beta;
  };

  MLPT() = default;

  MLPT(const MlpConfig& config, Rng& rng) : config_(config) {
    std::size_t in = config.input_dim;
    for (std::size_t h : config.hidden_dims) {
      Block b;
      b.dense = DenseLayerT<T>(in, h, config.hidden_activation);
      b.dense.init_glorot(rng);
      if (config.use_batchnorm) b.bn.emplace(h);
      blocks_.push_back(std::move(b));
      in = h;
    }
    Block out;
    out.dense = DenseLayerT<T>(in, config.num_classes, Activation::kLinear);
    out.dense.init_glorot(rng);
    blocks_.push_back(std::move(out));
    alloc_grads();
  }

  std::size_t num_layers() const { return blocks_.size(); }
  std::size_t num_classes() const { return blocks_.back().dense.out_dim(); }
  std::size_t input_dim() const { return blocks_.front().dense.in_dim(); }
  const MlpConfig& config() const { return config_; }

  Block& block(std::size_t l) { return blocks_[l]; }
  const Block& block(std::size_t l) const { return blocks_[l]; }

  void set_all_frozen(bool frozen) {
    for (Block& b : blocks_) b.frozen = frozen;
  }

  // Returns logits; records every intermediate representation in `cache`
  // when one is supplied. Eval mode is a pure function of inputs and
  // parameters; train mode updates batch norm running statistics.
  Mat<T> forward(const Mat<T>& batch, BatchNormMode mode = BatchNormMode::kEval,
                 ForwardCacheT<T>* cache = nullptr, SiteTransformT<T>* hook = nullptr) {
    if (cache) {
      cache->layers.assign(blocks_.size(), LayerCacheT<T>{});
      cache->batch_rows = batch.rows;
      cache->valid = false;
    }
    Mat<T> x = hook ? hook->forward(0, batch) : batch;
    for (std::size_t l = 0; l < blocks_.size(); ++l) {
      Block& blk = blocks_[l];
      require(x.cols == blk.dense.in_dim(),
              "forward: batch width " + std::to_string(x.cols) + " does not match layer " +
                  std::to_string(l) + " input dim " + std::to_string(blk.dense.in_dim()));
      Mat<T> z = matmul(x, blk.dense.weight);
      add_row_vector(z, blk.dense.bias);
      if (cache) cache->layers[l].input = std::move(x);
      if (blk.bn) z = blk.bn->forward(z, mode, cache ? &cache->layers[l].bn : nullptr);
      Mat<T> h(z.rows, z.cols);
      for (std::size_t i = 0; i < z.data.size(); ++i)
        h.data[i] = activate(blk.dense.activation, z.data[i]);
      if (cache) {
        cache->layers[l].z = std::move(z);
        cache->layers[l].h = h;
      }
      const bool last = (l + 1 == blocks_.size());
      if (!last && hook) h = hook->forward(l + 1, h);
      x = std::move(h);
    }
    check_finite(x, "logits");
    if (cache) cache->valid = true;
    return x;
  }

  // Accumulates parameter gradients from dL/dlogits into the gradient
  // buffers (zero_grads first for a fresh step); frozen blocks keep their
  // buffers untouched. Returns dL/d(input batch).
  Mat<T> backward(const ForwardCacheT<T>& cache, const Mat<T>& d_logits,
                  SiteTransformT<T>* hook = nullptr) {
    require(cache.valid, "backward: missing or stale forward cache");
    require(cache.layers.size() == blocks_.size(), "backward: cache layer count mismatch");
    require(d_logits.rows == cache.batch_rows, "backward: gradient batch size mismatch");
    require(d_logits.cols == num_classes(), "backward: gradient width mismatch");

    Mat<T> dx = d_logits;
    for (std::size_t li = blocks_.size(); li-- > 0;) {
      Block& blk = blocks_[li];
      const LayerCacheT<T>& lc = cache.layers[li];
      const bool last = (li + 1 == blocks_.size());
      if (!last && hook) dx = hook->backward(li + 1, dx);
      Mat<T> dz(dx.rows, dx.cols);
      for (std::size_t i = 0; i < dx.data.size(); ++i)
        dz.data[i] = dx.data[i] * activation_grad(blk.dense.activation, lc.z.data[i], lc.h.data[i]);
      if (blk.bn) {
        if (blk.frozen) {
          std::vector<T> scratch_gamma(blk.bn->dim(), T(0)), scratch_beta(blk.bn->dim(), T(0));
          dz = blk.bn->backward(dz, lc.bn, scratch_gamma, scratch_beta);
        } else {
          dz = blk.bn->backward(dz, lc.bn, blk.d_gamma, blk.d_beta);
        }
      }
      if (!blk.frozen) {
        Mat<T> dw = matmul_at_b(lc.input, dz);
        for (std::size_t i = 0; i < dw.data.size(); ++i) blk.d_weight.data[i] += dw.data[i];
        std::vector<T> db = column_sums(dz);
        for (std::size_t j = 0; j < db.size(); ++j) blk.d_bias[j] += db[j];
      }
      dx = matmul_a_bt(dz, blk.dense.weight);
    }
    if (hook) dx = hook->backward(0, dx);
    return dx;
  }

  void zero_grads() {
    for (Block& b : blocks_) {
      b.d_weight.fill(T(0));
      std::fill(b.d_bias.begin(), b.d_bias.end(), T(0));
      std::fill(b.d_gamma.begin(), b.d_gamma.end(), T(0));
      std::fill(b.d_beta.begin(), b.d_beta.end(), T(0));
    }
  }

  // Trainable parameters, in a fixed order.
  std::vector<TensorViewT<T>> param_views(const std::string& prefix = "") {
    return collect_views(prefix, /*grads=*/false, /*include_running=*/false);
  }

  std::vector<TensorViewT<T>> grad_views(const std::string& prefix = "") {
    return collect_views(prefix, /*grads=*/true, /*include_running=*/false);
  }

  // Parameters plus batch norm running statistics: everything a checkpoint
  // must carry to reproduce eval-mode behavior.
  std::vector<TensorViewT<T>> state_views(const std::string& prefix = "") {
    return collect_views(prefix, /*grads=*/false, /*include_running=*/true);
  }

  template <typename U>
  MLPT<U> cast() const {
    MLPT<U> out;
    out.config_ = config_;
    for (const Block& b : blocks_) {
      typename MLPT<U>::Block nb;
      nb.dense = b.dense.template cast<U>();
      if (b.bn) nb.bn.emplace(b.bn->template cast<U>());
      nb.frozen = b.frozen;
      out.blocks_.push_back(std::move(nb));
    }
    out.alloc_grads();
    return out;
  }

  bool same_parameters(const MLPT<T>& other) const {
    if (blocks_.size() != other.blocks_.size()) return false;
    for (std::size_t l = 0; l < blocks_.size(); ++l) {
      const Block& a = blocks_[l];
      const Block& b = other.blocks_[l];
      if (!(a.dense.weight == b.dense.weight) || a.dense.bias != b.dense.bias) return false;
      if (a.bn.has_value() != b.bn.has_value()) return false;
      if (a.bn && (a.bn->gamma != b.bn->gamma || a.bn->beta != b.bn->beta ||
                   a.bn->running_mean != b.bn->running_mean ||
                   a.bn->running_var != b.bn->running_var))
        return false;
    }
    return true;
  }

  void alloc_grads() {
    for (Block& b : blocks_) {
      b.d_weight = Mat<T>(b.dense.in_dim(), b.dense.out_dim());
      b.d_bias.assign(b.dense.out_dim(), T(0));
      if (b.bn) {
        b.d_gamma.assign(b.bn->dim(), T(0));
        b.d_beta.assign(b.bn->dim(), T(0));
      }
    }
  }

  MlpConfig config_;
  std::vector<Block> blocks_;

 private:
  std::vector<TensorViewT<T>> collect_views(const std::string& prefix, bool grads,
                                            bool include_running) {
    std::vector<TensorViewT<T>> views;
    for (std::size_t l = 0; l < blocks_.size(); ++l) {
      Block& b = blocks_[l];
      const std::string base = prefix + "layer" + std::to_string(l);
      views.push_back(make_view(base + ".weight", {b.dense.in_dim(), b.dense.out_dim()},
                                grads ? b.d_weight.data.data() : b.dense.weight.data.data()));
      // Batch norm's mean subtraction makes the dense bias redundant (its
      // exact gradient is identically zero), so it stays out of the
      // trainable set; beta is the effective bias. It still serializes.
      if (!b.bn || (include_running && !grads))
        views.push_back(make_view(base + ".bias", {b.dense.out_dim()},
                                  grads ? b.d_bias.data() : b.dense.bias.data()));
      if (b.bn) {
        views.push_back(make_view(base + ".bn.gamma", {b.bn->dim()},
                                  grads ? b.d_gamma.data() : b.bn->gamma.data()));
        views.push_back(make_view(base + ".bn.beta", {b.bn->dim()},
                                  grads ? b.d_beta.data() : b.bn->beta.data()));
        if (include_running && !grads) {
          views.push_back(
              make_view(base + ".bn.running_mean", {b.bn->dim()}, b.bn->running_mean.data()));
          views.push_back(
              make_view(base + ".bn.running_var", {b.bn->dim()}, b.bn->running_var.data()));
        }
      }
    }
    return views;
  }

  template <typename U>
  friend class MLPT;
};

using MLP = MLPT<float>;
using ForwardCache = ForwardCacheT<float>;

}  // namespace satforge::nn
