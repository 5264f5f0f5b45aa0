// src/spk_eval.cpp
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

#include "satforge/backend/spk_eval.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "satforge/backend/eer.hpp"
#include "satforge/backend/scoring.hpp"

namespace satforge::backend {

std::string backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kCosine: return "cosine";
    case BackendKind::kPlda: return "plda";
    case BackendKind::kLda: return "lda";
    case BackendKind::kLdaPlda: return "lda-plda";
  }
  return "cosine";
}

BackendKind parse_backend(const std::string& name) {
  if (name == "cosine") return BackendKind::kCosine;
  if (name == "plda") return BackendKind::kPlda;
  if (name == "lda") return BackendKind::kLda;
  if (name == "lda-plda") return BackendKind::kLdaPlda;
  throw DataError("unknown backend: " + name);
}

EmbeddingTable compute_embedding_table(const data::Corpus& corpus, data::EmbeddingKind kind,
                                       const data::EmbeddingConfig& embcfg) {
  EmbeddingTable table;
  for (const data::Utterance& u : corpus.utterances)
    table.emplace(u.id, data::oracle_embedding(u, kind, embcfg).values);
  return table;
}

namespace {

const std::vector<float>& table_lookup(const EmbeddingTable& table, const std::string& id) {
  auto it = table.find(id);
  require_data(it != table.end(), "embedding table is missing utterance " + id);
  return it->second;
}

}  // namespace

SpkEvalSession::SpkEvalSession(const data::Corpus& corpus, const EmbeddingTable& table,
                               const SpkEvalConfig& cfg)
    : cfg_(cfg) {
  // Raw utterance embeddings for the training split. Classes that end up
  // with a single sample (subset relabeling strands a few at the split
  // boundaries) cannot inform the supervised backends and are dropped.
  std::map<int, std::size_t> label_counts;
  for (const data::Utterance& u : corpus.utterances)
    if (u.split == data::Split::kTrain) ++label_counts[u.speaker_index];
  std::vector<std::vector<float>> train_raw;
  std::vector<int> train_labels;
  for (const data::Utterance& u : corpus.utterances) {
    if (u.split != data::Split::kTrain) continue;
    if (label_counts[u.speaker_index] < 2) continue;
    train_raw.push_back(table_lookup(table, u.id));
    train_labels.push_back(u.speaker_index);
  }
  require(train_raw.size() >= 4, "spk_eval: training split too small to fit backends");
  DMatrix train(train_raw.size(), train_raw.front().size());
  for (std::size_t i = 0; i < train_raw.size(); ++i)
    for (std::size_t j = 0; j < train.cols; ++j) train(i, j) = train_raw[i][j];

  if (cfg.pca_dim > 0 && cfg.pca_dim < train.cols) {
    pca_ = pca_fit(train, cfg.pca_dim);
    use_pca_ = true;
    train = pca_apply(pca_, train);
  }

  const bool needs_lda = cfg.backend == BackendKind::kLda || cfg.backend == BackendKind::kLdaPlda;
  if (needs_lda) {
    std::set<int> speakers(train_labels.begin(), train_labels.end());
    std::size_t out_dim = cfg.lda_dim;
    const std::size_t cap = std::min(train.cols, speakers.size() - 1);
    if (out_dim == 0 || out_dim > cap) out_dim = cap;
    lda_ = lda_fit(train, train_labels, out_dim);
    use_lda_ = true;
    train = lda_apply(lda_, train);
  }

  const bool needs_plda =
      cfg.backend == BackendKind::kPlda || cfg.backend == BackendKind::kLdaPlda;
  if (needs_plda) {
    plda_ = plda_fit(train, train_labels);
    use_plda_ = true;
  }

  // Frozen eval-side split.
  data::EnrollTestSplit split = data::split_enroll_test(corpus);
  excluded_speakers_ = split.excluded_speakers;
  std::set<std::string> seen_speakers;
  for (const data::Utterance* u : split.enroll) {
    Item item;
    item.utt_id = u->id;
    item.speaker = corpus.speakers[u->speaker_index];
    item.duration = u->duration_sec;
    item.embedding = transform(table_lookup(table, u->id));
    if (seen_speakers.insert(item.speaker).second) enroll_speaker_list_.push_back(item.speaker);
    enroll_.push_back(std::move(item));
  }
  for (const data::Utterance* u : split.test) {
    Item item;
    item.utt_id = u->id;
    item.speaker = corpus.speakers[u->speaker_index];
    item.duration = u->duration_sec;
    item.embedding = transform(table_lookup(table, u->id));
    test_.push_back(std::move(item));
  }
  require(enroll_speaker_list_.size() >= 2, "spk_eval: need at least 2 evaluable speakers");
}

std::vector<double> SpkEvalSession::transform(const std::vector<float>& raw) const {
  DMatrix x(1, raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) x(0, j) = raw[j];
  if (use_pca_) x = pca_apply(pca_, x);
  if (use_lda_) x = lda_apply(lda_, x);
  return x.data;
}

double SpkEvalSession::score(const std::vector<double>& enroll,
                             const std::vector<double>& test) const {
  if (use_plda_) return plda_score(plda_, enroll, test);
  return cosine_score(enroll, test);
}

SpkEvalResult SpkEvalSession::evaluate(double min_length_sec) const {
  // Representations from the enrollment recordings that pass the filter.
  std::map<std::string, std::vector<const std::vector<double>*>> enroll_by_speaker;
  for (const Item& item : enroll_)
    if (item.duration + 1e-9 >= min_length_sec)
      enroll_by_speaker[item.speaker].push_back(&item.embedding);
  std::map<std::string, std::vector<double>> reprs;
  std::set<std::string> surviving;
  for (const auto& [speaker, embs] : enroll_by_speaker) {
    reprs[speaker] = speaker_representation(embs);
    surviving.insert(speaker);
  }
  require(surviving.size() >= 2, "spk_eval: fewer than 2 speakers survive the length filter");

  std::vector<std::pair<std::string, std::string>> test_utts;
  std::map<std::string, double> test_durations;
  std::map<std::string, const Item*> test_items;
  for (const Item& item : test_) {
    test_utts.push_back({item.utt_id, item.speaker});
    test_durations[item.utt_id] = item.duration;
    test_items[item.utt_id] = &item;
  }

  TrialSet trials = make_trials(enroll_speaker_list_, test_utts, cfg_.non_target_prop,
                                cfg_.trial_seed);
  if (min_length_sec > 0.0)
    trials = filter_trials_by_min_length(trials, test_durations, surviving, min_length_sec);
  require(!trials.trials.empty(), "spk_eval: no trials survive the length filter");

  SpkEvalResult result;
  result.trials = trials;
  result.enroll_speakers = surviving.size();
  result.excluded_speakers = excluded_speakers_;
  std::set<std::string> counted;
  std::vector<bool> is_target;
  for (const Trial& t : trials.trials) {
    const Item* item = test_items.at(t.test_utt);
    result.scores.push_back(score(reprs.at(t.enroll_speaker), item->embedding));
    is_target.push_back(t.target);
    counted.insert(t.test_utt);
  }
  result.test_utts = counted.size();
  result.eer_percent = eer_percent(result.scores, is_target);
  return result;
}

std::vector<std::pair<double, double>> SpkEvalSession::eer_by_min_length(
    const std::vector<double>& thresholds) const {
  std::vector<std::pair<double, double>> curve;
  for (double th : thresholds) curve.push_back({th, evaluate(th).eer_percent});
  return curve;
}

}  // namespace satforge::backend
