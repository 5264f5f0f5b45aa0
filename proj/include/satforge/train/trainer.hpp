// satforge/train/trainer.hpp
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

#include <cstdint>
#include <string>
#include <vector>

#include "satforge/backend/transforms.hpp"
#include "satforge/cond/conditioner.hpp"
#include "satforge/data/corpus.hpp"
#include "satforge/data/embeddings.hpp"
#include "satforge/nn/mlp.hpp"

namespace satforge::train {

struct TrainConfig {
  std::uint64_t seed = 1;
  float lr = 0.1f;          // stage 1
  float lr_stage2 = 0.02f;  // stage 2 (both policies)
  float momentum = 0.9f;
  std::size_t batch_size = 256;
  std::size_t epochs_stage1 = 15;
  std::size_t epochs_stage2 = 10;
  std::size_t patience = 5;  // early stop on dev frame error rate
  bool use_cmn = true;

  template <typename V>
  void visit(V& v) {
    v.field("seed", seed);
    v.field("lr", lr);
    v.field("lr_stage2", lr_stage2);
    v.field("momentum", momentum);
    v.field("batch_size", batch_size);
    v.field("epochs_stage1", epochs_stage1);
    v.field("epochs_stage2", epochs_stage2);
    v.field("patience", patience);
    v.field("use_cmn", use_cmn);
  }
};

enum class SATPolicy { kFineTuneAll, kFreezeMain };

std::string sat_policy_name(SATPolicy policy);
SATPolicy parse_sat_policy(const std::string& name);

// Optional dimensionality reduction applied to the embeddings before they
// reach the conditioning mechanism; fitted on the training split.
enum class ProjectionKind { kNone, kPca, kLda };

std::string projection_kind_name(ProjectionKind kind);
ProjectionKind parse_projection_kind(const std::string& name);

// Embeddings are standardized against the training split before they reach
// the conditioning mechanism (raw oracle embeddings carry strongly nonzero
// means that would push a conditioned model off its frozen normalization
// statistics), then optionally projected down by PCA or LDA.
struct EmbProjection {
  ProjectionKind kind = ProjectionKind::kNone;
  std::vector<float> center;   // raw_dim, train-split mean
  std::vector<float> inv_std;  // raw_dim, zero for constant dimensions
  std::vector<float> mean;     // post-standardization projection center
  Matrix matrix;               // out_dim x raw_dim

  std::size_t out_dim(std::size_t raw_dim) const {
    return kind == ProjectionKind::kNone ? raw_dim : matrix.rows;
  }

  std::vector<float> apply(const std::vector<float>& x) const;
};

EmbProjection fit_projection(ProjectionKind kind, std::size_t out_dim,
                             const data::Corpus& corpus, data::EmbeddingKind emb_kind,
                             const data::EmbeddingConfig& embcfg);

struct UttFer {
  std::string id;
  std::size_t frames = 0;
  std::size_t errors = 0;
  double duration_sec = 0.0;
};

struct EvalReport {
  std::string experiment;
  std::string stage;  // "si" or "sat"
  std::string split;
  double fer_percent = 100.0;
  std::vector<UttFer> per_utterance;
  std::vector<std::pair<double, double>> fer_by_min_length;
  std::string corpus_fingerprint;
  std::string config_fingerprint;
};

// A runnable frame classifier: the network plus whatever conditions it.
struct ModelSetup {
  nn::MLP mlp;
  bool conditioned = false;
  cond::Conditioner conditioner;
  data::EmbeddingKind emb_kind = data::EmbeddingKind::kOracleFull;
  EmbProjection projection;
  // Serialized marker; mechanisms without trainable parameters would
  // otherwise leave a conditioned checkpoint indistinguishable from a bare
  // one.
  float conditioned_flag = 0.0f;
};

struct TrainResult {
  ModelSetup setup;
  EvalReport dev_report;
  EvalReport eval_report;
  std::vector<double> epoch_dev_fer;  // index 0 is the pre-training state
  double best_dev_fer = 100.0;
};

struct SatOptions {
  cond::ConditioningSpec spec;
  data::EmbeddingKind emb_kind = data::EmbeddingKind::kOracleFull;
  SATPolicy policy = SATPolicy::kFineTuneAll;
  ProjectionKind projection = ProjectionKind::kNone;
  std::size_t projection_dim = 0;
};

// Stage 1: the speaker-independent frame classifier; returns the best-dev
// checkpoint. Features are speaker-mean normalized when the config says so.
TrainResult train_si(const data::Corpus& corpus, const nn::MlpConfig& mlp_config,
                     const TrainConfig& cfg);

// Stage 2: starts from the SI parameters exactly (the concatenation spec
// widens the first layer with zero-initialized embedding columns so the
// starting point still reproduces the SI model). freeze_main leaves every
// main-network tensor bit-identical and trains only the conditioning
// parameters.
TrainResult train_sat(const data::Corpus& corpus, const ModelSetup& si,
                      const data::EmbeddingConfig& embcfg, const SatOptions& options,
                      const TrainConfig& cfg);

EvalReport eval_fer(ModelSetup& setup, const data::Corpus& corpus, data::Split split,
                    const data::EmbeddingConfig& embcfg, bool apply_cmn,
                    const std::vector<double>& length_thresholds = {});

// Side-by-side ranking with a relative-improvement column; refuses reports
// from different corpora.
struct ComparisonRow {
  std::string experiment;
  std::string stage;
  double fer_percent = 0.0;
  double relative_gain = 0.0;  // (baseline - this) / baseline
};

std::vector<ComparisonRow> compare_experiments(const std::vector<EvalReport>& reports,
                                               const std::string& baseline_experiment);

// Checkpoint plumbing for whole setups.
std::vector<TensorView> setup_state_views(ModelSetup& setup);

}  // namespace satforge::train
