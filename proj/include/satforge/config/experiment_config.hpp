// satforge/config/experiment_config.hpp
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

#include "satforge/backend/spk_eval.hpp"
#include "satforge/cond/spec.hpp"
#include "satforge/data/corpus.hpp"
#include "satforge/data/embeddings.hpp"
#include "satforge/nn/mlp.hpp"
#include "satforge/train/trainer.hpp"

namespace satforge::config {

struct EmbeddingsSection {
  std::string kind = "oracle-full";
  data::EmbeddingConfig params;

  template <typename V>
  void visit(V& v) {
    v.field("kind", kind);
    params.visit(v);
  }

  data::EmbeddingKind parsed_kind() const { return data::parse_embedding_kind(kind); }
};

struct ModelSection {
  std::string preset = "desk";  // "desk" or "reference"
  std::size_t hidden_layers = 4;
  std::size_t hidden_units = 64;
  bool batchnorm = true;
  std::string activation = "relu";

  template <typename V>
  void visit(V& v) {
    v.field("preset", preset);
    v.field("hidden_layers", hidden_layers);
    v.field("hidden_units", hidden_units);
    v.field("batchnorm", batchnorm);
    v.field("activation", activation);
  }

  nn::MlpConfig to_mlp_config(std::size_t feat_dim, std::size_t num_classes) const;
};

struct ConditioningSection {
  std::string mechanism = "none";
  std::string mode = "shift";
  std::string activation = "linear";
  std::string site = "input";
  std::size_t shared_units = 100;
  bool use_skip = true;
  float constant_scale = 0.1f;
  std::string projection = "none";
  std::size_t projection_dim = 0;

  template <typename V>
  void visit(V& v) {
    v.field("mechanism", mechanism);
    v.field("mode", mode);
    v.field("activation", activation);
    v.field("site", site);
    v.field("shared_units", shared_units);
    v.field("use_skip", use_skip);
    v.field("constant_scale", constant_scale);
    v.field("projection", projection);
    v.field("projection_dim", projection_dim);
  }

  cond::ConditioningSpec to_spec() const;
};

struct TrainingSection {
  train::TrainConfig params;
  std::string policy = "fine-tune-all";

  template <typename V>
  void visit(V& v) {
    params.visit(v);
    v.field("policy", policy);
  }

  train::SATPolicy parsed_policy() const { return train::parse_sat_policy(policy); }
};

struct EvaluationSection {
  std::uint64_t trial_seed = 99;
  double non_target_prop = 0.5;
  std::size_t pca_dim = 0;
  std::size_t lda_dim = 0;
  std::string backend = "cosine";
  std::string min_length_sweep;  // comma-separated seconds, empty = off
  double subset_max_sec = 0.0;   // 0 = off

  template <typename V>
  void visit(V& v) {
    v.field("trial_seed", trial_seed);
    v.field("non_target_prop", non_target_prop);
    v.field("pca_dim", pca_dim);
    v.field("lda_dim", lda_dim);
    v.field("backend", backend);
    v.field("min_length_sweep", min_length_sweep);
    v.field("subset_max_sec", subset_max_sec);
  }

  std::vector<double> sweep_thresholds() const;
};

// The whole experiment file: flat "[section] key = value" text. Every field
// has a default, unknown keys are rejected, and parse -> serialize -> parse
// is the identity.
struct ExperimentConfig {
  data::CorpusConfig corpus;
  EmbeddingsSection embeddings;
  ModelSection model;
  ConditioningSection conditioning;
  TrainingSection training;
  EvaluationSection evaluation;

  std::string serialize() const;
  std::uint64_t fingerprint() const;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);

  void save(const std::string& path) const;

  bool operator==(const ExperimentConfig& other) const {
    return serialize() == other.serialize();
  }

  // Thorough validation of the enum-like string fields.
  void validate() const;
};

}  // namespace satforge::config
