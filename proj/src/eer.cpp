// src/eer.cpp
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

#include "satforge/backend/eer.hpp"

#include <algorithm>
#include <limits>

#include "satforge/errors.hpp"

namespace satforge::backend {

std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<bool>& is_target) {
  require(scores.size() == is_target.size(), "roc_points: size mismatch");
  std::vector<double> targets, nontargets;
  for (std::size_t i = 0; i < scores.size(); ++i)
    (is_target[i] ? targets : nontargets).push_back(scores[i]);
  require(!targets.empty() && !nontargets.empty(),
          "roc_points: need at least one target and one non-target score");
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());

  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double nt = static_cast<double>(targets.size());
  const double nn = static_cast<double>(nontargets.size());
  std::vector<RocPoint> points;
  points.reserve(thresholds.size() + 1);
  points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 0.0});
  for (double th : thresholds) {
    // accept iff score > th
    const auto rejected_targets =
        std::upper_bound(targets.begin(), targets.end(), th) - targets.begin();
    const auto accepted_nontargets =
        nontargets.end() - std::upper_bound(nontargets.begin(), nontargets.end(), th);
    points.push_back({th, static_cast<double>(accepted_nontargets) / nn,
                      static_cast<double>(rejected_targets) / nt});
  }
  return points;
}

double eer_percent(const std::vector<double>& scores, const std::vector<bool>& is_target) {
  const std::vector<RocPoint> points = roc_points(scores, is_target);
  // FAR falls and FRR rises along the sweep; the first point with
  // FAR <= FRR brackets the crossing with its predecessor.
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double d1 = points[k - 1].far - points[k - 1].frr;
    const double d2 = points[k].far - points[k].frr;
    if (d2 <= 0.0) {
      const double t = d1 / (d1 - d2);
      return 100.0 * (points[k - 1].far + t * (points[k].far - points[k - 1].far));
    }
  }
  // FAR stays above FRR until the accept-nothing end of the sweep.
  return 100.0 * points.back().far;
}

}  // namespace satforge::backend
