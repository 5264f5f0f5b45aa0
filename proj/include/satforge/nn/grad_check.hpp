// satforge/nn/grad_check.hpp
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

#include "satforge/cond/conditioner.hpp"
#include "satforge/nn/loss.hpp"
#include "satforge/nn/mlp.hpp"

namespace satforge::nn {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
};

// Compares analytic gradients against central finite differences. Both
// sides run on a 64-bit shadow copy of the model so that cancellation in
// the numeric quotient does not mask real backward-pass defects; the
// production path stays 32-bit. Intended for models with < 20k parameters.
inline GradCheckResult grad_check(const MLPT<float>& model,
                                  const cond::ConditionerT<float>* conditioner,
                                  const Matrix& batch, const Matrix* embeddings,
                                  const std::vector<int>& labels, double epsilon = 1e-3,
                                  BatchNormMode mode = BatchNormMode::kTrain) {
  MLPT<double> shadow = model.cast<double>();
  cond::ConditionerT<double> cond_shadow;
  const bool with_cond = conditioner != nullptr;
  if (with_cond) cond_shadow = conditioner->cast<double>();
  Mat<double> x = batch.cast<double>();
  Mat<double> e;
  if (embeddings) e = embeddings->cast<double>();

  // Batch norm running statistics drift in train mode; evaluating the loss
  // must not mutate state, so every evaluation works on a fresh copy.
  auto loss_at = [&](MLPT<double>& m, cond::ConditionerT<double>& c) -> double {
    MLPT<double> mc = m;
    cond::ConditionerT<double> cc = c;
    ForwardCacheT<double> cache;
    if (with_cond) cc.set_batch(e);
    Mat<double> logits = mc.forward(x, mode, &cache, with_cond ? &cc : nullptr);
    return cross_entropy_loss(logits, labels).loss;
  };

  // Analytic gradients.
  {
    MLPT<double> mc = shadow;
    cond::ConditionerT<double> cc = cond_shadow;
    ForwardCacheT<double> cache;
    if (with_cond) cc.set_batch(e);
    mc.zero_grads();
    cc.zero_grads();
    Mat<double> logits = mc.forward(x, mode, &cache, with_cond ? &cc : nullptr);
    auto loss = cross_entropy_loss(logits, labels);
    mc.backward(cache, loss.d_logits, with_cond ? &cc : nullptr);

    auto params = mc.param_views("net.");
    auto grads = mc.grad_views("net.");
    if (with_cond) {
      auto cp = cc.param_views("cond.");
      auto cg = cc.grad_views("cond.");
      params.insert(params.end(), cp.begin(), cp.end());
      grads.insert(grads.end(), cg.begin(), cg.end());
    }

    // The same views point into mc/cc, which also receive the numeric
    // perturbations below.
    GradCheckResult result;
    std::size_t total = 0;
    for (const auto& p : params) total += p.size;
    require(total < 20000, "grad_check: model too large (" + std::to_string(total) + " params)");

    for (std::size_t k = 0; k < params.size(); ++k) {
      for (std::size_t i = 0; i < params[k].size; ++i) {
        const double saved = params[k].data[i];
        params[k].data[i] = saved + epsilon;
        const double loss_hi = loss_at(mc, cc);
        params[k].data[i] = saved - epsilon;
        const double loss_lo = loss_at(mc, cc);
        params[k].data[i] = saved;
        const double numeric = (loss_hi - loss_lo) / (2.0 * epsilon);
        const double analytic = grads[k].data[i];
        const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
        const double rel = std::fabs(analytic - numeric) / denom;
        if (rel > result.max_rel_error) {
          result.max_rel_error = rel;
          result.worst_param = params[k].name + "[" + std::to_string(i) + "]";
        }
      }
    }
    return result;
  }
}

}  // namespace satforge::nn
