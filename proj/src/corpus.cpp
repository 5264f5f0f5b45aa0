// src/corpus.cpp
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

#include "satforge/data/corpus.hpp"

#include <algorithm>
#include <set>
#include <cmath>
#include <cstdio>
#include <map>

#include "satforge/rng.hpp"

namespace satforge::data {

std::uint64_t corpus_config_fingerprint(const CorpusConfig& config) {
  KvWriter w;
  const_cast<CorpusConfig&>(config).visit(w);
  std::string text;
  for (const auto& [k, v] : w.lines()) text += k + "=" + v + "\n";
  return fnv1a64(text);
}

std::uint64_t Corpus::fingerprint() const { return corpus_config_fingerprint(config); }

namespace {

std::string speaker_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%03zu", index);
  return buf;
}

std::string utterance_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%06zu", index);
  return buf;
}

std::vector<int> sample_label_chain(std::size_t frames, std::size_t num_classes, double p_stay,
                                    Rng& rng) {
  std::vector<int> labels(frames);
  labels[0] = static_cast<int>(rng.uniform_int(0, static_cast<std::int64_t>(num_classes) - 1));
  for (std::size_t t = 1; t < frames; ++t) {
    if (rng.uniform01() < p_stay) {
      labels[t] = labels[t - 1];
    } else {
      // Uniform over the other classes.
      auto step = rng.uniform_int(1, static_cast<std::int64_t>(num_classes) - 1);
      labels[t] = static_cast<int>((labels[t - 1] + step) % static_cast<std::int64_t>(num_classes));
    }
  }
  return labels;
}

}  // namespace

Corpus gen_corpus(const CorpusConfig& config) {
  require(config.num_speakers >= 2, "gen_corpus: need at least 2 speakers");
  require(config.num_classes >= 2, "gen_corpus: need at least 2 classes");
  require(config.feat_dim >= 2, "gen_corpus: need feat_dim >= 2");
  require(config.utts_per_speaker >= 1, "gen_corpus: need at least 1 utterance per speaker");
  require(config.frames_min >= 1 && config.frames_min <= config.frames_max,
          "gen_corpus: bad frame range");
  require(config.session_utts_min >= 1 && config.session_utts_min <= config.session_utts_max,
          "gen_corpus: bad session size range");
  require(config.train_frac >= 0 && config.dev_frac >= 0 &&
              config.train_frac + config.dev_frac <= 1.0,
          "gen_corpus: bad split fractions");

  Corpus corpus;
  corpus.config = config;
  Rng rng(config.seed);

  const std::size_t f = config.feat_dim;
  corpus.class_prototypes = Matrix(config.num_classes, f);
  std::vector<float> proto_center(f);
  for (float& v : proto_center)
    v = static_cast<float>(config.proto_center_scale * rng.gaussian());
  for (std::size_t k = 0; k < config.num_classes; ++k)
    for (std::size_t j = 0; j < f; ++j)
      corpus.class_prototypes(k, j) =
          proto_center[j] + static_cast<float>(config.proto_scale * rng.gaussian());

  // Speaker split when eval speakers must be disjoint from train/dev.
  std::size_t first_eval_speaker = config.num_speakers;  // i.e. none
  if (!config.eval_speaker_overlap) {
    const double eval_frac = 1.0 - config.train_frac - config.dev_frac;
    std::size_t n_eval = static_cast<std::size_t>(
        std::lround(eval_frac * static_cast<double>(config.num_speakers)));
    n_eval = std::max<std::size_t>(2, std::min(n_eval, config.num_speakers - 2));
    first_eval_speaker = config.num_speakers - n_eval;
  }

  std::size_t utt_index = 0;
  for (std::size_t s = 0; s < config.num_speakers; ++s) {
    corpus.speakers.push_back(speaker_name(s));
    std::vector<float> offset(f);
    for (float& v : offset) v = static_cast<float>(config.speaker_offset_scale * rng.gaussian());

    // Per-speaker split boundaries over the utterance sequence. Sessions
    // are contiguous, so early sessions land in train and late ones in
    // dev/eval, like distinct recording days.
    const std::size_t n = config.utts_per_speaker;
    std::size_t n_train = static_cast<std::size_t>(std::lround(config.train_frac * n));
    std::size_t n_dev = static_cast<std::size_t>(std::lround(config.dev_frac * n));
    if (n_train + n_dev > n) n_dev = n - n_train;

    std::size_t produced = 0;
    int session = 0;
    while (produced < n) {
      std::size_t session_len = static_cast<std::size_t>(rng.uniform_int(
          static_cast<std::int64_t>(config.session_utts_min),
          static_cast<std::int64_t>(config.session_utts_max)));
      session_len = std::min(session_len, n - produced);
      // Whole sessions belong to one split: recordings do not straddle
      // dataset boundaries, and held-out splits measure unseen sessions.
      Split session_split;
      if (s >= first_eval_speaker) {
        session_split = Split::kEval;
      } else if (produced < n_train) {
        session_split = Split::kTrain;
      } else if (produced < n_train + n_dev) {
        session_split = Split::kDev;
      } else {
        session_split = config.eval_speaker_overlap ? Split::kEval : Split::kDev;
      }
      std::vector<float> session_channel(f);
      for (float& v : session_channel)
        v = static_cast<float>(std::exp(config.channel_log_sigma * rng.gaussian()));
      const float session_noise =
          static_cast<float>(rng.uniform(config.noise_min, config.noise_max));

      for (std::size_t k = 0; k < session_len; ++k, ++produced) {
        Utterance utt;
        utt.id = utterance_name(utt_index++);
        utt.speaker_index = static_cast<int>(s);
        utt.latents.speaker_id = corpus.speakers.back();
        utt.latents.speaker_offset = offset;
        utt.latents.session = session;
        utt.latents.channel_scale.resize(f);
        for (std::size_t j = 0; j < f; ++j)
          utt.latents.channel_scale[j] = session_channel[j] *
              static_cast<float>(std::exp(config.channel_drift_sigma * rng.gaussian()));
        utt.latents.noise_level = session_noise *
            static_cast<float>(std::exp(config.noise_drift_sigma * rng.gaussian()));

        const std::size_t frames = static_cast<std::size_t>(rng.uniform_int(
            static_cast<std::int64_t>(config.frames_min),
            static_cast<std::int64_t>(config.frames_max)));
        utt.labels = sample_label_chain(frames, config.num_classes, config.p_stay, rng);
        utt.frames = Matrix(frames, f);
        for (std::size_t t = 0; t < frames; ++t) {
          const float* proto = corpus.class_prototypes.row_ptr(utt.labels[t]);
          float* row = utt.frames.row_ptr(t);
          for (std::size_t j = 0; j < f; ++j) {
            row[j] = proto[j] * utt.latents.channel_scale[j] + offset[j] +
                     utt.latents.noise_level * static_cast<float>(rng.gaussian());
          }
        }
        utt.duration_sec = static_cast<float>(frames * config.frame_period_sec);

        utt.split = session_split;
        corpus.utterances.push_back(std::move(utt));
      }
      ++session;
    }
  }
  return corpus;
}

void cmn_group(std::vector<Utterance*>& group) {
  require(!group.empty(), "cmn_group: empty group");
  const std::size_t f = group.front()->frames.cols;
  std::vector<double> mean(f, 0.0);
  std::size_t total = 0;
  for (Utterance* u : group) {
    for (std::size_t t = 0; t < u->frames.rows; ++t) {
      const float* row = u->frames.row_ptr(t);
      for (std::size_t j = 0; j < f; ++j) mean[j] += row[j];
    }
    total += u->frames.rows;
  }
  require(total > 0, "cmn_group: no frames");
  for (double& m : mean) m /= static_cast<double>(total);
  for (Utterance* u : group)
    for (std::size_t t = 0; t < u->frames.rows; ++t) {
      float* row = u->frames.row_ptr(t);
      for (std::size_t j = 0; j < f; ++j) row[j] -= static_cast<float>(mean[j]);
    }
}

Corpus cmn_by_speaker(const Corpus& corpus) {
  Corpus out = corpus;
  std::map<int, std::vector<Utterance*>> by_speaker;
  for (Utterance& u : out.utterances) by_speaker[u.speaker_index].push_back(&u);
  for (auto& [speaker, group] : by_speaker) {
    (void)speaker;
    cmn_group(group);
  }
  return out;
}

EnrollTestSplit split_enroll_test(const Corpus& corpus) {
  EnrollTestSplit split;
  std::map<int, std::vector<const Utterance*>> by_speaker;
  for (const Utterance& u : corpus.utterances)
    if (u.split == Split::kEval) by_speaker[u.speaker_index].push_back(&u);
  for (auto& [speaker, utts] : by_speaker) {
    if (utts.size() < 2) {
      split.excluded_speakers.push_back(corpus.speakers[speaker]);
      continue;
    }
    // Enrollment and test come from different recording sessions whenever a
    // speaker has more than one, so that verification cannot ride on a
    // shared session. Single-session speakers alternate utterances.
    std::set<int> sessions;
    for (const Utterance* u : utts) sessions.insert(u->latents.session);
    if (sessions.size() >= 2) {
      std::map<int, std::size_t> session_rank;
      for (int sess : sessions) session_rank.emplace(sess, session_rank.size());
      for (const Utterance* u : utts)
        (session_rank[u->latents.session] % 2 == 0 ? split.enroll : split.test).push_back(u);
    } else {
      for (std::size_t i = 0; i < utts.size(); ++i)
        (i % 2 == 0 ? split.enroll : split.test).push_back(utts[i]);
    }
  }
  return split;
}

}  // namespace satforge::data
