// satforge/backend/eer.hpp
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

#include <vector>

namespace satforge::backend {

struct RocPoint {
  double threshold;  // accept when score > threshold
  double far;        // non-targets accepted / non-targets
  double frr;        // targets rejected / targets
};

// Operating points from sweeping the threshold over the sorted unique
// scores, preceded by the accept-everything point.
std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<bool>& is_target);

// Equal error rate in percent: the crossing of FAR and FRR along the sweep,
// linearly interpolated between the two bracketing operating points.
double eer_percent(const std::vector<double>& scores, const std::vector<bool>& is_target);

}  // namespace satforge::backend
