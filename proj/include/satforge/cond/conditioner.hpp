// satforge/cond/conditioner.hpp
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
#include <map>
#include <string>
#include <vector>

#include "satforge/cond/spec.hpp"
#include "satforge/matrix.hpp"
#include "satforge/nn/mlp.hpp"
#include "satforge/rng.hpp"
#include "satforge/tensor.hpp"

namespace satforge::cond {

// Applies the configured mechanism at its sites inside an MLP forward pass.
// The embedding matrix is row-aligned with the feature batch: one row per
// frame. Utterance- and speaker-level embeddings arrive with their rows
// repeated, which makes broadcasting and frame-level conditioning the same
// code path.
//
// Conditioning parameters start near the identity transform so that a
// freshly conditioned model reproduces its unconditioned initializer:
// scale-producing paths start near 1, shift-producing paths near 0. The
// exceptions are fixed by construction (constant scale has no parameters;
// the control vector's sigmoid gate is driven strongly negative instead).
template <typename T>
class ConditionerT : public nn::SiteTransformT<T> {
 public:
  struct SiteParams {
    std::size_t dim = 0;
    // control layer (also holds the control vector / variable weights)
    Mat<T> weight;
    std::vector<T> bias;
    // control network heads
    Mat<T> scale_w, bias_w;
    std::vector<T> scale_b, bias_b;
    // gradients
    Mat<T> d_weight, d_scale_w, d_bias_w;
    std::vector<T> d_bias, d_scale_b, d_bias_b;
  };

  ConditionerT() = default;

  ConditionerT(const ConditioningSpec& spec, std::size_t embed_dim,
               const std::vector<std::size_t>& sites, const std::vector<std::size_t>& site_dims,
               Rng& rng)
      : spec_(spec), embed_dim_(embed_dim) {
    require(sites.size() == site_dims.size(), "conditioner: site/dim list size mismatch");
    for (std::size_t i = 0; i < sites.size(); ++i) {
      if (spec.mechanism == Mechanism::kControlVector ||
          spec.mechanism == Mechanism::kControlVariable ||
          spec.mechanism == Mechanism::kConstantScale) {
        require(embed_dim == site_dims[i],
                mechanism_name(spec.mechanism) + " requires embedding dim == site dim (" +
                    std::to_string(embed_dim) + " vs " + std::to_string(site_dims[i]) + ")");
      }
      if (spec.mechanism == Mechanism::kConcatenate)
        require(sites[i] == 0, "concatenation applies to the input features only");
      site_params_[sites[i]].dim = site_dims[i];
    }
    init_params(rng);
  }

  const ConditioningSpec& spec() const { return spec_; }
  std::size_t embed_dim() const { return embed_dim_; }

  bool site_active(std::size_t site) const { return site_params_.count(site) != 0; }

  std::size_t output_cols(std::size_t site, std::size_t in_cols) const {
    if (spec_.mechanism == Mechanism::kConcatenate && site_active(site))
      return in_cols + embed_dim_;
    return in_cols;
  }

  // Must be called before each forward pass; rows align with the batch.
  void set_batch(const Mat<T>& embeddings) {
    require(embeddings.cols == embed_dim_, "conditioner: embedding width mismatch");
    embeddings_ = embeddings;
    caches_.clear();
  }

  Mat<T> forward(std::size_t site, const Mat<T>& x) override {
    if (!site_active(site)) return x;
    require(embeddings_.rows == x.rows,
            "conditioner: embedding rows do not match batch rows at site " + std::to_string(site));
    SiteParams& p = site_params_.at(site);
    require(p.dim == x.cols || spec_.mechanism == Mechanism::kConcatenate,
            "conditioner: width mismatch at site " + std::to_string(site));
    SiteCache& cache = caches_[site];
    switch (spec_.mechanism) {
      case Mechanism::kNone:
        return x;
      case Mechanism::kConcatenate:
        return hstack(x, embeddings_);
      case Mechanism::kConstantScale: {
        Mat<T> y = x;
        const T c = static_cast<T>(spec_.constant_scale);
        for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += c * embeddings_.data[i];
        return y;
      }
      case Mechanism::kControlVariable: {
        Mat<T> y = x;
        const T w = p.bias[0];
        for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += w * embeddings_.data[i];
        return y;
      }
      case Mechanism::kControlVector: {
        Mat<T> y = x;
        std::vector<T> gate(p.dim);
        for (std::size_t j = 0; j < p.dim; ++j)
          gate[j] = nn::activate(nn::Activation::kSigmoid, p.bias[j]);
        for (std::size_t i = 0; i < y.rows; ++i)
          for (std::size_t j = 0; j < p.dim; ++j) y(i, j) += gate[j] * embeddings_(i, j);
        cache.gate = std::move(gate);
        return y;
      }
      case Mechanism::kControlLayer: {
        Mat<T> z = matmul(embeddings_, p.weight);
        add_row_vector(z, p.bias);
        Mat<T> a(z.rows, z.cols);
        for (std::size_t i = 0; i < z.data.size(); ++i)
          a.data[i] = nn::activate(spec_.activation, z.data[i]);
        Mat<T> y;
        if (spec_.mode == ApplyMode::kShift) {
          y = x;
          for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += a.data[i];
        } else {
          y = hadamard(x, a);
          cache.x = x;
        }
        cache.z = std::move(z);
        cache.a = std::move(a);
        return y;
      }
      case Mechanism::kControlNetwork:
        return control_network_forward(p, x, cache);
    }
    return x;
  }

  Mat<T> backward(std::size_t site, const Mat<T>& d_out) override {
    if (!site_active(site)) return d_out;
    SiteParams& p = site_params_.at(site);
    SiteCache& cache = caches_.at(site);
    switch (spec_.mechanism) {
      case Mechanism::kNone:
        return d_out;
      case Mechanism::kConcatenate: {
        Mat<T> dx(d_out.rows, p.dim);
        for (std::size_t i = 0; i < d_out.rows; ++i)
          for (std::size_t j = 0; j < p.dim; ++j) dx(i, j) = d_out(i, j);
        return dx;
      }
      case Mechanism::kConstantScale:
        return d_out;
      case Mechanism::kControlVariable: {
        T acc = T(0);
        for (std::size_t i = 0; i < d_out.data.size(); ++i)
          acc += d_out.data[i] * embeddings_.data[i];
        p.d_bias[0] += acc;
        return d_out;
      }
      case Mechanism::kControlVector: {
        for (std::size_t j = 0; j < p.dim; ++j) {
          const T g = cache.gate[j];
          T acc = T(0);
          for (std::size_t i = 0; i < d_out.rows; ++i) acc += d_out(i, j) * embeddings_(i, j);
          p.d_bias[j] += acc * g * (T(1) - g);
        }
        return d_out;
      }
      case Mechanism::kControlLayer: {
        Mat<T> dx, da;
        if (spec_.mode == ApplyMode::kShift) {
          dx = d_out;
          da = d_out;
        } else {
          dx = hadamard(d_out, cache.a);
          da = hadamard(d_out, cache.x);
        }
        Mat<T> dz(da.rows, da.cols);
        for (std::size_t i = 0; i < da.data.size(); ++i)
          dz.data[i] =
              da.data[i] * nn::activation_grad(spec_.activation, cache.z.data[i], cache.a.data[i]);
        accumulate(p.d_weight, matmul_at_b(embeddings_, dz));
        accumulate(p.d_bias, column_sums(dz));
        return dx;
      }
      case Mechanism::kControlNetwork:
        return control_network_backward(p, d_out, cache);
    }
    return d_out;
  }

  void zero_grads() {
    d_trunk_w1_.fill(T(0));
    d_trunk_w2_.fill(T(0));
    std::fill(d_trunk_b1_.begin(), d_trunk_b1_.end(), T(0));
    std::fill(d_trunk_b2_.begin(), d_trunk_b2_.end(), T(0));
    for (auto& [site, p] : site_params_) {
      (void)site;
      p.d_weight.fill(T(0));
      p.d_scale_w.fill(T(0));
      p.d_bias_w.fill(T(0));
      std::fill(p.d_bias.begin(), p.d_bias.end(), T(0));
      std::fill(p.d_scale_b.begin(), p.d_scale_b.end(), T(0));
      std::fill(p.d_bias_b.begin(), p.d_bias_b.end(), T(0));
    }
  }

  std::size_t num_trainable_params() {
    std::size_t n = 0;
    for (const auto& v : param_views()) n += v.size;
    return n;
  }

  std::vector<TensorViewT<T>> param_views(const std::string& prefix = "") {
    return collect_views(prefix, false);
  }

  std::vector<TensorViewT<T>> grad_views(const std::string& prefix = "") {
    return collect_views(prefix, true);
  }

  template <typename U>
  ConditionerT<U> cast() const {
    ConditionerT<U> out;
    out.spec_ = spec_;
    out.embed_dim_ = embed_dim_;
    out.trunk_w1_ = trunk_w1_.template cast<U>();
    out.trunk_w2_ = trunk_w2_.template cast<U>();
    out.trunk_b1_.assign(trunk_b1_.begin(), trunk_b1_.end());
    out.trunk_b2_.assign(trunk_b2_.begin(), trunk_b2_.end());
    for (const auto& [site, p] : site_params_) {
      typename ConditionerT<U>::SiteParams np;
      np.dim = p.dim;
      np.weight = p.weight.template cast<U>();
      np.bias.assign(p.bias.begin(), p.bias.end());
      np.scale_w = p.scale_w.template cast<U>();
      np.bias_w = p.bias_w.template cast<U>();
      np.scale_b.assign(p.scale_b.begin(), p.scale_b.end());
      np.bias_b.assign(p.bias_b.begin(), p.bias_b.end());
      out.site_params_[site] = std::move(np);
    }
    out.alloc_grads();
    return out;
  }

  // Direct parameter access for tests and surgical setups.
  SiteParams& site_params(std::size_t site) { return site_params_.at(site); }
  Mat<T>& trunk_w1() { return trunk_w1_; }
  Mat<T>& trunk_w2() { return trunk_w2_; }
  std::vector<T>& trunk_b1() { return trunk_b1_; }
  std::vector<T>& trunk_b2() { return trunk_b2_; }

  void alloc_grads() {
    d_trunk_w1_ = Mat<T>(trunk_w1_.rows, trunk_w1_.cols);
    d_trunk_w2_ = Mat<T>(trunk_w2_.rows, trunk_w2_.cols);
    d_trunk_b1_.assign(trunk_b1_.size(), T(0));
    d_trunk_b2_.assign(trunk_b2_.size(), T(0));
    for (auto& [site, p] : site_params_) {
      (void)site;
      p.d_weight = Mat<T>(p.weight.rows, p.weight.cols);
      p.d_bias.assign(p.bias.size(), T(0));
      p.d_scale_w = Mat<T>(p.scale_w.rows, p.scale_w.cols);
      p.d_bias_w = Mat<T>(p.bias_w.rows, p.bias_w.cols);
      p.d_scale_b.assign(p.scale_b.size(), T(0));
      p.d_bias_b.assign(p.bias_b.size(), T(0));
    }
  }

 private:
  struct SiteCache {
    Mat<T> x;            // input at the site (scale paths need it)
    Mat<T> z, a;         // control layer pre/post activation
    std::vector<T> gate; // control vector sigmoid values
    Mat<T> t1, t2;       // trunk activations
    Mat<T> s, b;         // head outputs
  };

  void init_params(Rng& rng) {
    const std::size_t u = spec_.shared_units;
    if (spec_.mechanism == Mechanism::kControlNetwork) {
      trunk_w1_ = Mat<T>(embed_dim_, u);
      trunk_b1_.assign(u, T(0));
      trunk_w2_ = Mat<T>(u, u);
      trunk_b2_.assign(u, T(0));
      glorot(trunk_w1_, rng);
      glorot(trunk_w2_, rng);
    }
    for (auto& [site, p] : site_params_) {
      (void)site;
      switch (spec_.mechanism) {
        case Mechanism::kControlNetwork: {
          p.scale_w = Mat<T>(u, p.dim);
          p.bias_w = Mat<T>(u, p.dim);
          small_uniform(p.scale_w, rng);
          small_uniform(p.bias_w, rng);
          // With the residual path the identity start is "adapt by nothing"
          // (gate ~ 0); without it the gate itself must start near 1.
          p.scale_b.assign(p.dim, spec_.use_skip ? T(-4) : T(4));
          p.bias_b.assign(p.dim, T(0));
          break;
        }
        case Mechanism::kControlLayer: {
          p.weight = Mat<T>(embed_dim_, p.dim);
          small_uniform(p.weight, rng);
          p.bias.assign(p.dim, identity_bias());
          break;
        }
        case Mechanism::kControlVector:
          p.bias.assign(p.dim, T(-4));
          break;
        case Mechanism::kControlVariable:
          p.bias.assign(1, T(0));
          break;
        default:
          break;
      }
    }
    alloc_grads();
  }

  T identity_bias() const {
    const bool shift = spec_.mode == ApplyMode::kShift;
    switch (spec_.activation) {
      case nn::Activation::kLinear:
        return shift ? T(0) : T(1);
      case nn::Activation::kTanh:
        return shift ? T(0) : T(std::atanh(0.995));
      case nn::Activation::kSigmoid:
        return shift ? T(-4) : T(4);
      case nn::Activation::kRelu:
        // relu is dead at exactly zero; keep a small positive pre-activation.
        return shift ? T(0.01) : T(1);
    }
    return T(0);
  }

  Mat<T> control_network_forward(SiteParams& p, const Mat<T>& x, SiteCache& cache) {
    Mat<T> z1 = matmul(embeddings_, trunk_w1_);
    add_row_vector(z1, trunk_b1_);
    relu_inplace(z1);
    Mat<T> z2 = matmul(z1, trunk_w2_);
    add_row_vector(z2, trunk_b2_);
    relu_inplace(z2);
    Mat<T> s = matmul(z2, p.scale_w);
    add_row_vector(s, p.scale_b);
    for (T& v : s.data) v = nn::activate(nn::Activation::kSigmoid, v);
    Mat<T> b = matmul(z2, p.bias_w);
    add_row_vector(b, p.bias_b);
    for (T& v : b.data) v = nn::activate(nn::Activation::kTanh, v);
    Mat<T> y(x.rows, x.cols);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
      const T adapted = x.data[i] * s.data[i] + b.data[i];
      y.data[i] = spec_.use_skip ? x.data[i] + adapted : adapted;
    }
    cache.x = x;
    cache.t1 = std::move(z1);
    cache.t2 = std::move(z2);
    cache.s = std::move(s);
    cache.b = std::move(b);
    return y;
  }

  Mat<T> control_network_backward(SiteParams& p, const Mat<T>& d_out, const SiteCache& cache) {
    const std::size_t n = d_out.rows;
    Mat<T> dx(n, d_out.cols);
    Mat<T> dzs(n, d_out.cols);  // through sigmoid head
    Mat<T> dzb(n, d_out.cols);  // through tanh head
    for (std::size_t i = 0; i < d_out.data.size(); ++i) {
      const T da = d_out.data[i];  // d(adapted); skip adds d_out to dx directly
      const T s = cache.s.data[i];
      const T b = cache.b.data[i];
      dx.data[i] = da * s + (spec_.use_skip ? d_out.data[i] : T(0));
      dzs.data[i] = da * cache.x.data[i] * s * (T(1) - s);
      dzb.data[i] = da * (T(1) - b * b);
    }
    accumulate(p.d_scale_w, matmul_at_b(cache.t2, dzs));
    accumulate(p.d_scale_b, column_sums(dzs));
    accumulate(p.d_bias_w, matmul_at_b(cache.t2, dzb));
    accumulate(p.d_bias_b, column_sums(dzb));
    Mat<T> dt2 = matmul_a_bt(dzs, p.scale_w);
    accumulate(dt2, matmul_a_bt(dzb, p.bias_w));
    for (std::size_t i = 0; i < dt2.data.size(); ++i)
      if (cache.t2.data[i] <= T(0)) dt2.data[i] = T(0);
    accumulate(d_trunk_w2_, matmul_at_b(cache.t1, dt2));
    accumulate(d_trunk_b2_, column_sums(dt2));
    Mat<T> dt1 = matmul_a_bt(dt2, trunk_w2_);
    for (std::size_t i = 0; i < dt1.data.size(); ++i)
      if (cache.t1.data[i] <= T(0)) dt1.data[i] = T(0);
    accumulate(d_trunk_w1_, matmul_at_b(embeddings_, dt1));
    accumulate(d_trunk_b1_, column_sums(dt1));
    return dx;
  }

  std::vector<TensorViewT<T>> collect_views(const std::string& prefix, bool grads) {
    std::vector<TensorViewT<T>> views;
    auto add_mat = [&](const std::string& name, Mat<T>& m) {
      if (!m.empty()) views.push_back(make_view(prefix + name, {m.rows, m.cols}, m.data.data()));
    };
    auto add_vec = [&](const std::string& name, std::vector<T>& v) {
      if (!v.empty()) views.push_back(make_view(prefix + name, {v.size()}, v.data()));
    };
    if (spec_.mechanism == Mechanism::kControlNetwork) {
      add_mat("trunk.w1", grads ? d_trunk_w1_ : trunk_w1_);
      add_vec("trunk.b1", grads ? d_trunk_b1_ : trunk_b1_);
      add_mat("trunk.w2", grads ? d_trunk_w2_ : trunk_w2_);
      add_vec("trunk.b2", grads ? d_trunk_b2_ : trunk_b2_);
    }
    for (auto& [site, p] : site_params_) {
      const std::string base = "site" + std::to_string(site) + ".";
      add_mat(base + "weight", grads ? p.d_weight : p.weight);
      add_vec(base + "bias", grads ? p.d_bias : p.bias);
      add_mat(base + "scale.weight", grads ? p.d_scale_w : p.scale_w);
      add_vec(base + "scale.bias", grads ? p.d_scale_b : p.scale_b);
      add_mat(base + "shift.weight", grads ? p.d_bias_w : p.bias_w);
      add_vec(base + "shift.bias", grads ? p.d_bias_b : p.bias_b);
    }
    return views;
  }

  static void glorot(Mat<T>& m, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(m.rows + m.cols));
    for (T& v : m.data) v = static_cast<T>(rng.uniform(-limit, limit));
  }

  static void small_uniform(Mat<T>& m, Rng& rng) {
    for (T& v : m.data) v = static_cast<T>(rng.uniform(-0.01, 0.01));
  }

  static void relu_inplace(Mat<T>& m) {
    for (T& v : m.data)
      if (v < T(0)) v = T(0);
  }

  static void accumulate(Mat<T>& dst, const Mat<T>& src) {
    for (std::size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
  }

  static void accumulate(std::vector<T>& dst, const std::vector<T>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }

  ConditioningSpec spec_;
  std::size_t embed_dim_ = 0;
  Mat<T> trunk_w1_, trunk_w2_;
  std::vector<T> trunk_b1_, trunk_b2_;
  Mat<T> d_trunk_w1_, d_trunk_w2_;
  std::vector<T> d_trunk_b1_, d_trunk_b2_;
  std::map<std::size_t, SiteParams> site_params_;
  Mat<T> embeddings_;
  std::map<std::size_t, SiteCache> caches_;

  template <typename U>
  friend class ConditionerT;
};

using Conditioner = ConditionerT<float>;

// Site dimensions for a frame classifier: the input width, then each hidden
// layer's width.
inline std::vector<std::size_t> site_dims_for(const std::vector<std::size_t>& sites,
                                              std::size_t feat_dim,
                                              const std::vector<std::size_t>& hidden_dims) {
  std::vector<std::size_t> dims;
  for (std::size_t s : sites) {
    if (s == 0) {
      dims.push_back(feat_dim);
    } else {
      require(s - 1 < hidden_dims.size(), "conditioning site beyond last hidden layer");
      dims.push_back(hidden_dims[s - 1]);
    }
  }
  return dims;
}

}  // namespace satforge::cond
