// src/trials.cpp
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

#include "satforge/backend/trials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "satforge/rng.hpp"

namespace satforge::backend {

TrialSet make_trials(const std::vector<std::string>& enroll_speakers,
                     const std::vector<std::pair<std::string, std::string>>& test_utts,
                     double non_target_prop, std::uint64_t seed) {
  require(enroll_speakers.size() >= 2, "make_trials: need at least 2 enrolled speakers");
  require(!test_utts.empty(), "make_trials: empty test set");
  require(non_target_prop >= 0.0 && non_target_prop < 1.0,
          "make_trials: non-target proportion must be in [0, 1)");

  TrialSet set;
  set.seed = seed;
  set.non_target_prop = non_target_prop;

  std::set<std::string> enrolled(enroll_speakers.begin(), enroll_speakers.end());
  std::vector<std::pair<std::string, std::string>> usable;
  for (const auto& [utt, speaker] : test_utts)
    if (enrolled.count(speaker)) usable.push_back({utt, speaker});
  require(!usable.empty(), "make_trials: no test utterance has an enrolled speaker");

  for (const auto& [utt, speaker] : usable) set.trials.push_back({speaker, utt, true});

  const std::size_t n_targets = set.trials.size();
  const std::size_t n_nontargets = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_targets) * non_target_prop / (1.0 - non_target_prop)));
  Rng rng(mix64(seed, 0x7472696c73ULL));
  for (std::size_t k = 0; k < n_nontargets; ++k) {
    const auto& [utt, speaker] = usable[k % usable.size()];
    // Uniform over the other speakers.
    std::string other;
    do {
      other = enroll_speakers[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(enroll_speakers.size()) - 1))];
    } while (other == speaker);
    set.trials.push_back({other, utt, false});
  }
  return set;
}

TrialSet filter_trials_by_min_length(const TrialSet& trials,
                                     const std::map<std::string, double>& test_durations,
                                     const std::set<std::string>& surviving_enroll_speakers,
                                     double min_sec) {
  TrialSet out;
  out.seed = trials.seed;
  out.non_target_prop = trials.non_target_prop;
  for (const Trial& t : trials.trials) {
    auto it = test_durations.find(t.test_utt);
    require(it != test_durations.end(),
            "filter_trials_by_min_length: unknown test utterance " + t.test_utt);
    if (it->second + 1e-9 < min_sec) continue;
    if (!surviving_enroll_speakers.count(t.enroll_speaker)) continue;
    out.trials.push_back(t);
  }
  return out;
}

SubsetSplitReport split_speaker_subsets(const data::Corpus& corpus, double max_sec) {
  require(max_sec > 0.0, "split_speaker_subsets: max_sec must be positive");
  SubsetSplitReport report;
  report.corpus = corpus;
  data::Corpus& out = report.corpus;

  // Utterances are already ordered per speaker (generation order), so the
  // greedy pass over the corpus is the contiguous assignment.
  std::map<int, std::pair<int, double>> state;  // speaker -> (subset index, filled seconds)
  std::map<std::string, int> new_index;
  out.speakers.clear();
  for (data::Utterance& u : out.utterances) {
    auto& [subset, filled] = state[u.speaker_index];
    if (filled > 0.0 && filled + u.duration_sec > max_sec) {
      ++subset;
      filled = 0.0;
    }
    if (u.duration_sec > max_sec) {
      report.oversized_utts.push_back(u.id);
      if (filled > 0.0) {
        ++subset;
        filled = 0.0;
      }
    }
    const std::string label =
        corpus.speakers[u.speaker_index] + "#" + std::to_string(subset);
    filled += u.duration_sec;
    // An oversized utterance occupies its subset alone.
    if (u.duration_sec > max_sec) filled = max_sec + 1.0;

    auto [it, inserted] = new_index.try_emplace(label, static_cast<int>(out.speakers.size()));
    if (inserted) out.speakers.push_back(label);
    u.latents.speaker_id = label;
    u.speaker_index = it->second;
  }
  return report;
}

void write_trials(const std::string& path, const TrialSet& trials) {
  std::ofstream out(path);
  require_data(out.good(), "cannot write trials file: " + path);
  for (const Trial& t : trials.trials)
    out << t.enroll_speaker << " " << t.test_utt << " " << (t.target ? "target" : "nontarget")
        << "\n";
  require_data(out.good(), "failed writing trials file: " + path);
}

void write_scores(const std::string& path, const TrialSet& trials,
                  const std::vector<double>& scores) {
  require(trials.trials.size() == scores.size(), "write_scores: score count mismatch");
  std::ofstream out(path);
  require_data(out.good(), "cannot write scores file: " + path);
  char buf[48];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g", scores[i]);
    out << trials.trials[i].enroll_speaker << " " << trials.trials[i].test_utt << " " << buf
        << "\n";
  }
  require_data(out.good(), "failed writing scores file: " + path);
}

}  // namespace satforge::backend
