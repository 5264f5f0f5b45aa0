// satforge/backend/trials.hpp
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
#include <map>
#include <set>
#include <string>
#include <vector>

#include "satforge/data/corpus.hpp"

namespace satforge::backend {

struct Trial {
  std::string enroll_speaker;
  std::string test_utt;
  bool target = false;
};

struct TrialSet {
  std::vector<Trial> trials;
  std::uint64_t seed = 0;
  double non_target_prop = 0.5;

  std::size_t num_targets() const {
    std::size_t n = 0;
    for (const Trial& t : trials) n += t.target ? 1 : 0;
    return n;
  }
};

// One target trial per test utterance against its own speaker; non-target
// trials pair test utterances round-robin with a uniformly random other
// speaker until the requested proportion is met. Deterministic per seed.
TrialSet make_trials(const std::vector<std::string>& enroll_speakers,
                     const std::vector<std::pair<std::string, std::string>>& test_utts,
                     double non_target_prop, std::uint64_t seed);

// Keeps trials whose test utterance is long enough and whose enroll side
// still has at least one enrollment recording above the threshold.
TrialSet filter_trials_by_min_length(const TrialSet& trials,
                                     const std::map<std::string, double>& test_durations,
                                     const std::set<std::string>& surviving_enroll_speakers,
                                     double min_sec);

struct SubsetSplitReport {
  data::Corpus corpus;                       // speaker labels replaced by subset labels
  std::vector<std::string> oversized_utts;   // single utterances beyond the cap
};

// Greedy contiguous regrouping of each speaker's utterances into subsets of
// at most max_sec total duration. Utterances longer than the cap form their
// own subset and are reported.
SubsetSplitReport split_speaker_subsets(const data::Corpus& corpus, double max_sec);

// Text formats: "enroll_id test_id target|nontarget" and
// "enroll_id test_id score" lines, order-stable.
void write_trials(const std::string& path, const TrialSet& trials);
void write_scores(const std::string& path, const TrialSet& trials,
                  const std::vector<double>& scores);

}  // namespace satforge::backend
