// satforge/nn/sgd.hpp
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
#include <string>
#include <unordered_map>
#include <vector>

#include "satforge/errors.hpp"
#include "satforge/tensor.hpp"

namespace satforge::nn {

// SGD with classical momentum: v <- momentum * v + g; p <- p - lr * v.
// Velocity buffers are keyed by tensor name and survive across steps.
class SgdOptimizer {
 public:
  SgdOptimizer(float lr, float momentum) : lr_(lr), momentum_(momentum) {}

  float learning_rate() const { return lr_; }
  void set_learning_rate(float lr) { lr_ = lr; }

  // Applies one update. The whole step is rejected (no parameter touched)
  // if any gradient is non-finite; the error names the offending tensor.
  void step(const std::vector<TensorView>& params, const std::vector<TensorView>& grads) {
    require(params.size() == grads.size(), "sgd_step: parameter/gradient list size mismatch");
    for (std::size_t k = 0; k < params.size(); ++k) {
      require(params[k].size == grads[k].size, "sgd_step: shape mismatch for " + params[k].name);
      for (std::size_t i = 0; i < grads[k].size; ++i)
        require_numeric(std::isfinite(grads[k].data[i]),
                        "sgd_step: non-finite gradient in " + params[k].name);
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      std::vector<float>& v = velocity_[params[k].name];
      if (v.size() != params[k].size) v.assign(params[k].size, 0.0f);
      float* p = params[k].data;
      const float* g = grads[k].data;
      for (std::size_t i = 0; i < params[k].size; ++i) {
        v[i] = momentum_ * v[i] + g[i];
        p[i] -= lr_ * v[i];
        require_numeric(std::isfinite(p[i]), "sgd_step: non-finite parameter in " + params[k].name);
      }
    }
  }

  void reset_velocity() { velocity_.clear(); }

 private:
  float lr_;
  float momentum_;
  std::unordered_map<std::string, std::vector<float>> velocity_;
};

}  // namespace satforge::nn
