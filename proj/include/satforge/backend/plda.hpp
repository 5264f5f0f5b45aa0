// satforge/backend/plda.hpp
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

#include <cstddef>
#include <vector>

#include "satforge/backend/eigen.hpp"

namespace satforge::backend {

// Two-covariance model: a class center drawn from N(mu, between), samples
// drawn from N(center, within).
struct PLDAModel {
  std::vector<double> mu;
  DMatrix between;  // PSD
  DMatrix within;   // PD
  std::size_t dropped_singleton_classes = 0;
  bool ridge_applied = false;

  // Precomputed scoring terms.
  DMatrix inv_within, inv_total, inv_same;  // W^-1, (B+W)^-1, (2B+W)^-1
  double logdet_within = 0.0, logdet_total = 0.0, logdet_same = 0.0;

  std::size_t dim() const { return mu.size(); }
};

// Moment-based estimate: within = pooled within-class covariance, between =
// covariance of class means with the within/count bias removed and projected
// back to the PSD cone. Classes with fewer than 2 samples are dropped.
PLDAModel plda_fit(const DMatrix& x, const std::vector<int>& labels);

// A model with given parameters, scoring terms ready.
PLDAModel make_plda(std::vector<double> mu, DMatrix between, DMatrix within);

// log N([e;t]; same-class joint) - log N([e;t]; independent-classes joint).
double plda_score(const PLDAModel& model, const std::vector<double>& enroll,
                  const std::vector<double>& test);

}  // namespace satforge::backend
