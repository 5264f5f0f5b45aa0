// satforge/data/embeddings.hpp
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

#include "satforge/data/corpus.hpp"
#include "satforge/matrix.hpp"

namespace satforge::data {

// Oracle extractors emulating the embedding families used for adaptive
// training: a multi-attribute utterance summary (i-vector / CNN-embedding
// analog), a clean channel-invariant speaker code (x-vector analog), a
// degraded multi-attribute variant, and a causal per-frame running
// estimate (online i-vector analog).
enum class EmbeddingKind { kOracleFull, kOracleSpeaker, kOracleFullNoisy, kOracleFrame };

enum class EmbeddingLevel { kFrame, kUtterance, kSpeaker };

struct Embedding {
  std::vector<float> values;
  EmbeddingLevel level = EmbeddingLevel::kUtterance;
  std::string kind;
};

struct EmbeddingConfig {
  std::uint64_t jitter_seed = 7;
  double jitter_full = 0.05;
  double jitter_full_noisy = 0.3;
  double jitter_speaker = 0.05;  // at the 100-frame reference length
  double jitter_frame = 0.6;     // per-frame instantaneous estimate noise

  template <typename V>
  void visit(V& v) {
    v.field("jitter_seed", jitter_seed);
    v.field("jitter_full", jitter_full);
    v.field("jitter_full_noisy", jitter_full_noisy);
    v.field("jitter_speaker", jitter_speaker);
    v.field("jitter_frame", jitter_frame);
  }
};

std::string embedding_kind_name(EmbeddingKind kind);
EmbeddingKind parse_embedding_kind(const std::string& name);

// full / full_noisy / frame embeddings carry (offset, channel, noise):
// 2 * feat_dim + 1 entries; speaker embeddings carry feat_dim.
std::size_t embedding_dim(EmbeddingKind kind, std::size_t feat_dim);

// Utterance-level embedding (for the frame kind: the running estimate after
// the last frame). Deterministic in (utterance id, kind, config).
Embedding oracle_embedding(const Utterance& utt, EmbeddingKind kind,
                           const EmbeddingConfig& config);

// Row t is the causal running estimate over frames 0..t.
Matrix oracle_frame_matrix(const Utterance& utt, const EmbeddingConfig& config);

// Table file: one "id dim v1 ... vd" line per utterance.
void write_embedding_table(const std::string& path,
                           const std::vector<std::pair<std::string, std::vector<float>>>& rows);
std::map<std::string, std::vector<float>> read_embedding_table(const std::string& path);

}  // namespace satforge::data
