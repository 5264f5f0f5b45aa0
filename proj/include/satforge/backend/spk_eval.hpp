// satforge/backend/spk_eval.hpp
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

#include <map>
#include <string>
#include <vector>

#include "satforge/backend/plda.hpp"
#include "satforge/backend/transforms.hpp"
#include "satforge/backend/trials.hpp"
#include "satforge/data/embeddings.hpp"

namespace satforge::backend {

enum class BackendKind { kCosine, kPlda, kLda, kLdaPlda };

std::string backend_name(BackendKind kind);
BackendKind parse_backend(const std::string& name);

struct SpkEvalConfig {
  BackendKind backend = BackendKind::kCosine;
  std::size_t pca_dim = 0;  // 0 disables the PCA reduction
  std::size_t lda_dim = 0;  // 0 picks min(dim, speakers - 1)
  double non_target_prop = 0.5;
  std::uint64_t trial_seed = 99;
};

struct SpkEvalResult {
  double eer_percent = 0.0;
  TrialSet trials;
  std::vector<double> scores;
  std::size_t enroll_speakers = 0;
  std::size_t test_utts = 0;
  std::vector<std::string> excluded_speakers;
};

using EmbeddingTable = std::map<std::string, std::vector<float>>;

// Every utterance's embedding, keyed by id, in a table ready for the
// evaluation pipeline or the table files.
EmbeddingTable compute_embedding_table(const data::Corpus& corpus, data::EmbeddingKind kind,
                                       const data::EmbeddingConfig& embcfg);

// Fits the configured backend on the train split's embeddings (speaker
// labels supervise the LDA/PLDA stages) and freezes the eval-side
// enroll/test split; per-threshold evaluation then filters both sides,
// recomputes the speaker representations from the surviving enrollment
// recordings, and scores the surviving trials.
class SpkEvalSession {
 public:
  SpkEvalSession(const data::Corpus& corpus, const EmbeddingTable& table,
                 const SpkEvalConfig& cfg);

  SpkEvalResult evaluate(double min_length_sec = 0.0) const;

  std::vector<std::pair<double, double>> eer_by_min_length(
      const std::vector<double>& thresholds) const;

 private:
  struct Item {
    std::string utt_id;
    std::string speaker;
    double duration = 0.0;
    std::vector<double> embedding;  // after backend transforms
  };

  std::vector<double> transform(const std::vector<float>& raw) const;
  double score(const std::vector<double>& enroll, const std::vector<double>& test) const;

  SpkEvalConfig cfg_;
  PCAModel pca_;
  bool use_pca_ = false;
  LDAModel lda_;
  bool use_lda_ = false;
  PLDAModel plda_;
  bool use_plda_ = false;
  std::vector<Item> enroll_, test_;
  std::vector<std::string> enroll_speaker_list_;
  std::vector<std::string> excluded_speakers_;
};

}  // namespace satforge::backend
