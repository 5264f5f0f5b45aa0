// src/embeddings.cpp
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

#include "satforge/data/embeddings.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "satforge/rng.hpp"

namespace satforge::data {

std::string embedding_kind_name(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::kOracleFull: return "oracle-full";
    case EmbeddingKind::kOracleSpeaker: return "oracle-speaker";
    case EmbeddingKind::kOracleFullNoisy: return "oracle-full-noisy";
    case EmbeddingKind::kOracleFrame: return "oracle-frame";
  }
  return "oracle-full";
}

EmbeddingKind parse_embedding_kind(const std::string& name) {
  if (name == "oracle-full") return EmbeddingKind::kOracleFull;
  if (name == "oracle-speaker") return EmbeddingKind::kOracleSpeaker;
  if (name == "oracle-full-noisy") return EmbeddingKind::kOracleFullNoisy;
  if (name == "oracle-frame") return EmbeddingKind::kOracleFrame;
  throw DataError("unknown embedding kind: " + name);
}

std::size_t embedding_dim(EmbeddingKind kind, std::size_t feat_dim) {
  return kind == EmbeddingKind::kOracleSpeaker ? feat_dim : 2 * feat_dim + 1;
}

namespace {

Rng utterance_rng(const Utterance& utt, EmbeddingKind kind, const EmbeddingConfig& config) {
  return Rng(mix64(mix64(config.jitter_seed, fnv1a64(utt.id)),
                   static_cast<std::uint64_t>(kind)));
}

// The noiseless target for the multi-attribute kinds.
std::vector<float> attribute_target(const Utterance& utt) {
  std::vector<float> target;
  target.reserve(2 * utt.latents.speaker_offset.size() + 1);
  target.insert(target.end(), utt.latents.speaker_offset.begin(),
                utt.latents.speaker_offset.end());
  target.insert(target.end(), utt.latents.channel_scale.begin(),
                utt.latents.channel_scale.end());
  target.push_back(utt.latents.noise_level);
  return target;
}

}  // namespace

Embedding oracle_embedding(const Utterance& utt, EmbeddingKind kind,
                           const EmbeddingConfig& config) {
  Embedding emb;
  emb.kind = embedding_kind_name(kind);
  Rng rng = utterance_rng(utt, kind, config);
  switch (kind) {
    case EmbeddingKind::kOracleFull:
    case EmbeddingKind::kOracleFullNoisy: {
      const double jitter = kind == EmbeddingKind::kOracleFull ? config.jitter_full
                                                               : config.jitter_full_noisy;
      emb.values = attribute_target(utt);
      for (float& v : emb.values) v += static_cast<float>(jitter * rng.gaussian());
      emb.level = EmbeddingLevel::kUtterance;
      break;
    }
    case EmbeddingKind::kOracleSpeaker: {
      // Jitter shrinks with utterance length: longer recordings pin the
      // speaker identity down more precisely.
      const double frames = static_cast<double>(utt.frames.rows);
      const double jitter = config.jitter_speaker * std::sqrt(100.0 / std::max(frames, 1.0));
      emb.values = utt.latents.speaker_offset;
      for (float& v : emb.values) v += static_cast<float>(jitter * rng.gaussian());
      emb.level = EmbeddingLevel::kUtterance;
      break;
    }
    case EmbeddingKind::kOracleFrame: {
      Matrix rows = oracle_frame_matrix(utt, config);
      emb.values.assign(rows.row_ptr(rows.rows - 1), rows.row_ptr(rows.rows - 1) + rows.cols);
      emb.level = EmbeddingLevel::kFrame;
      break;
    }
  }
  return emb;
}

Matrix oracle_frame_matrix(const Utterance& utt, const EmbeddingConfig& config) {
  Rng rng = utterance_rng(utt, EmbeddingKind::kOracleFrame, config);
  const std::vector<float> target = attribute_target(utt);
  const std::size_t d = target.size();
  const std::size_t frames = utt.frames.rows;
  Matrix out(frames, d);
  std::vector<double> running(d, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t j = 0; j < d; ++j) {
      const double instant = target[j] + config.jitter_frame * rng.gaussian();
      running[j] += (instant - running[j]) / static_cast<double>(t + 1);
      out(t, j) = static_cast<float>(running[j]);
    }
  }
  return out;
}

void write_embedding_table(const std::string& path,
                           const std::vector<std::pair<std::string, std::vector<float>>>& rows) {
  std::ofstream out(path);
  require_data(out.good(), "cannot open embedding table for writing: " + path);
  for (const auto& [id, values] : rows) {
    out << id << " " << values.size();
    char buf[40];
    for (float v : values) {
      std::snprintf(buf, sizeof(buf), " %.9g", static_cast<double>(v));
      out << buf;
    }
    out << "\n";
  }
  require_data(out.good(), "failed writing embedding table: " + path);
}

std::map<std::string, std::vector<float>> read_embedding_table(const std::string& path) {
  std::ifstream in(path);
  require_data(in.good(), "cannot open embedding table: " + path);
  std::map<std::string, std::vector<float>> table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id;
    std::size_t dim = 0;
    ls >> id >> dim;
    require_data(!id.empty(), "malformed embedding table line: '" + line + "'");
    std::vector<float> values(dim);
    for (std::size_t j = 0; j < dim; ++j)
      require_data(static_cast<bool>(ls >> values[j]),
                   "embedding table row " + id + " is truncated");
    require_data(table.emplace(id, std::move(values)).second,
                 "duplicate id in embedding table: " + id);
  }
  return table;
}

}  // namespace satforge::data
