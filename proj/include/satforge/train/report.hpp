// satforge/train/report.hpp
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

#include <string>
#include <vector>

#include "satforge/train/trainer.hpp"

namespace satforge::train {

// "experiment,stage,split,threshold,fer" rows: one threshold-0 row for the
// overall rate, then any length-filtered points.
std::string fer_csv(const std::vector<EvalReport>& reports);
void write_fer_csv(const std::string& path, const std::vector<EvalReport>& reports);
std::vector<EvalReport> read_fer_csv(const std::string& path);

std::string comparison_csv(const std::vector<ComparisonRow>& rows);
void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& rows);

}  // namespace satforge::train
