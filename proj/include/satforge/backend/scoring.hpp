// satforge/backend/scoring.hpp
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

#include <cmath>
#include <vector>

#include "satforge/errors.hpp"

namespace satforge::backend {

inline double cosine_score(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size() && !a.empty(), "cosine_score: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  require(na > 0.0 && nb > 0.0, "cosine_score: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Speaker-level representation: arithmetic mean of the enroll embeddings.
inline std::vector<double> speaker_representation(
    const std::vector<const std::vector<double>*>& enroll) {
  require(!enroll.empty(), "speaker_representation: no enroll embeddings");
  std::vector<double> mean(enroll.front()->size(), 0.0);
  for (const std::vector<double>* e : enroll) {
    require(e->size() == mean.size(), "speaker_representation: dimension mismatch");
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += (*e)[j];
  }
  for (double& v : mean) v /= static_cast<double>(enroll.size());
  return mean;
}

}  // namespace satforge::backend
