// satforge/data/corpus.hpp
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

#include "satforge/kv.hpp"
#include "satforge/matrix.hpp"

namespace satforge::data {

enum class Split { kTrain, kDev, kEval };

inline std::string split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kEval: return "eval";
  }
  return "train";
}

inline Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "eval") return Split::kEval;
  throw DataError("unknown split: " + name);
}

// Ground-truth generative factors of one utterance. The speaker offset is
// constant for a speaker; channel and noise are drawn per utterance, with
// contiguous utterances correlated through a shared recording session.
struct AttributeLatents {
  std::string speaker_id;
  std::vector<float> speaker_offset;  // feat_dim
  std::vector<float> channel_scale;   // feat_dim, entries > 0
  float noise_level = 0.0f;           // >= 0
  int session = 0;                    // session index within the speaker
};

struct Utterance {
  std::string id;
  Matrix frames;            // T x feat_dim
  std::vector<int> labels;  // per-frame class index
  AttributeLatents latents;
  float duration_sec = 0.0f;
  Split split = Split::kTrain;
  int speaker_index = 0;
};

struct CorpusConfig {
  std::uint64_t seed = 1;
  std::size_t num_speakers = 40;
  std::size_t utts_per_speaker = 30;
  std::size_t feat_dim = 20;
  std::size_t num_classes = 24;
  std::size_t frames_min = 50;
  std::size_t frames_max = 400;
  double frame_period_sec = 0.01;
  double p_stay = 0.9;  // label chain self-loop probability
  double proto_scale = 1.0;
  // Shared component of all class prototypes. The multiplicative channel
  // turns it into a class-independent per-session distortion, the additive
  // structure that utterance-level compensation targets.
  double proto_center_scale = 0.0;
  double speaker_offset_scale = 1.0;
  double channel_log_sigma = 0.15;   // session-level log-scale spread
  double channel_drift_sigma = 0.05; // per-utterance wobble around the session
  double noise_min = 0.1;
  double noise_max = 0.5;
  double noise_drift_sigma = 0.1;
  std::size_t session_utts_min = 4;
  std::size_t session_utts_max = 6;
  double train_frac = 0.7;
  double dev_frac = 0.1;
  bool eval_speaker_overlap = true;

  template <typename V>
  void visit(V& v) {
    v.field("seed", seed);
    v.field("num_speakers", num_speakers);
    v.field("utts_per_speaker", utts_per_speaker);
    v.field("feat_dim", feat_dim);
    v.field("num_classes", num_classes);
    v.field("frames_min", frames_min);
    v.field("frames_max", frames_max);
    v.field("frame_period_sec", frame_period_sec);
    v.field("p_stay", p_stay);
    v.field("proto_scale", proto_scale);
    v.field("proto_center_scale", proto_center_scale);
    v.field("speaker_offset_scale", speaker_offset_scale);
    v.field("channel_log_sigma", channel_log_sigma);
    v.field("channel_drift_sigma", channel_drift_sigma);
    v.field("noise_min", noise_min);
    v.field("noise_max", noise_max);
    v.field("noise_drift_sigma", noise_drift_sigma);
    v.field("session_utts_min", session_utts_min);
    v.field("session_utts_max", session_utts_max);
    v.field("train_frac", train_frac);
    v.field("dev_frac", dev_frac);
    v.field("eval_speaker_overlap", eval_speaker_overlap);
  }
};

struct Corpus {
  CorpusConfig config;
  std::vector<std::string> speakers;
  Matrix class_prototypes;  // num_classes x feat_dim
  std::vector<Utterance> utterances;

  std::vector<const Utterance*> split_utterances(Split s) const {
    std::vector<const Utterance*> out;
    for (const Utterance& u : utterances)
      if (u.split == s) out.push_back(&u);
    return out;
  }

  std::uint64_t fingerprint() const;
};

// Fingerprint of a generation config (what Corpus::fingerprint reports).
std::uint64_t corpus_config_fingerprint(const CorpusConfig& config);

// Frame t with label k is prototype_k (*) channel + speaker_offset +
// noise * g_t. Labels follow a first-order Markov chain. The result is a
// pure function of the config.
Corpus gen_corpus(const CorpusConfig& config);

// Subtracts the mean frame of the group from every frame in the group.
void cmn_group(std::vector<Utterance*>& group);

// Speaker-level cepstral mean normalization over the whole corpus.
Corpus cmn_by_speaker(const Corpus& corpus);

struct EnrollTestSplit {
  std::vector<const Utterance*> enroll;
  std::vector<const Utterance*> test;
  std::vector<std::string> excluded_speakers;  // fewer than 2 eval utterances
};

// Deterministic half/half split of the eval set so that every speaker
// appears on both sides.
EnrollTestSplit split_enroll_test(const Corpus& corpus);

}  // namespace satforge::data
