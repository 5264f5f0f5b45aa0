// src/setup_io.cpp
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

#include "satforge/train/setup_io.hpp"

#include "satforge/nn/checkpoint.hpp"

namespace satforge::train {

void save_setup(const std::string& path, ModelSetup& setup) {
  nn::save_checkpoint(path, setup_state_views(setup));
}

ModelSetup load_setup(const std::string& path, const config::ExperimentConfig& cfg,
                      const data::Corpus& corpus, bool conditioned) {
  const std::size_t feat = corpus.config.feat_dim;
  nn::MlpConfig mlp_config = cfg.model.to_mlp_config(feat, corpus.config.num_classes);

  ModelSetup setup;
  setup.conditioned = conditioned;
  std::size_t e_dim = 0;
  if (conditioned) {
    setup.emb_kind = cfg.embeddings.parsed_kind();
    setup.projection.kind = parse_projection_kind(cfg.conditioning.projection);
    const std::size_t raw_dim = data::embedding_dim(setup.emb_kind, feat);
    setup.projection.center.assign(raw_dim, 0.0f);
    setup.projection.inv_std.assign(raw_dim, 0.0f);
    if (setup.projection.kind != ProjectionKind::kNone) {
      // The projection output width may have been resolved at fit time;
      // read it back from the stored tensor.
      auto stored = nn::load_checkpoint(path);
      auto it = stored.find("embproj.matrix");
      require_data(it != stored.end(), "checkpoint " + path + " has no embedding projection");
      require_data(it->second.dims.size() == 2 && it->second.dims[1] == raw_dim,
                   "checkpoint embedding projection has unexpected shape");
      setup.projection.matrix = Matrix(it->second.dims[0], it->second.dims[1]);
      setup.projection.mean.assign(it->second.dims[0], 0.0f);
      e_dim = it->second.dims[0];
    } else {
      e_dim = raw_dim;
    }
    if (cfg.conditioning.to_spec().mechanism == cond::Mechanism::kConcatenate)
      mlp_config.input_dim += e_dim;
  }

  Rng rng(0);
  setup.mlp = nn::MLP(mlp_config, rng);
  if (conditioned) {
    const cond::ConditioningSpec spec = cfg.conditioning.to_spec();
    const auto sites = cond::resolve_sites(spec, setup.mlp.num_layers());
    const auto site_dims =
        cond::site_dims_for(sites, feat, mlp_config.hidden_dims);
    setup.conditioner = cond::Conditioner(spec, e_dim, sites, site_dims, rng);
  }
  nn::load_checkpoint_into(path, setup_state_views(setup));
  return setup;
}

}  // namespace satforge::train
