// src/report.cpp
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

#include "satforge/train/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace satforge::train {

namespace {

std::string format_fer(double fer) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", fer);
  return buf;
}

std::string format_threshold(double th) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", th);
  return buf;
}

}  // namespace

std::string fer_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream out;
  out << "experiment,stage,split,threshold,fer\n";
  for (const EvalReport& r : reports) {
    out << r.experiment << "," << r.stage << "," << r.split << ",0," << format_fer(r.fer_percent)
        << "\n";
    for (const auto& [th, fer] : r.fer_by_min_length) {
      if (th == 0.0) continue;  // already covered by the overall row
      out << r.experiment << "," << r.stage << "," << r.split << "," << format_threshold(th)
          << "," << format_fer(fer) << "\n";
    }
  }
  return out.str();
}

void write_fer_csv(const std::string& path, const std::vector<EvalReport>& reports) {
  std::ofstream out(path);
  require_data(out.good(), "cannot write report csv: " + path);
  out << fer_csv(reports);
  require_data(out.good(), "failed writing report csv: " + path);
}

std::vector<EvalReport> read_fer_csv(const std::string& path) {
  std::ifstream in(path);
  require_data(in.good(), "cannot open report csv: " + path);
  std::string line;
  require_data(static_cast<bool>(std::getline(in, line)) &&
                   line == "experiment,stage,split,threshold,fer",
               "bad report csv header in " + path);
  std::vector<EvalReport> reports;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string experiment, stage, split, threshold, fer;
    std::getline(ls, experiment, ',');
    std::getline(ls, stage, ',');
    std::getline(ls, split, ',');
    std::getline(ls, threshold, ',');
    std::getline(ls, fer, ',');
    const double th = std::strtod(threshold.c_str(), nullptr);
    const double fer_val = std::strtod(fer.c_str(), nullptr);
    if (th == 0.0) {
      EvalReport r;
      r.experiment = experiment;
      r.stage = stage;
      r.split = split;
      r.fer_percent = fer_val;
      reports.push_back(std::move(r));
    } else {
      require_data(!reports.empty() && reports.back().experiment == experiment,
                   "report csv has a sweep row before its overall row: " + line);
      reports.back().fer_by_min_length.push_back({th, fer_val});
    }
  }
  return reports;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "experiment,stage,fer,relative_gain\n";
  char buf[32];
  for (const ComparisonRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.4f", r.fer_percent);
    out << r.experiment << "," << r.stage << "," << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.4f", r.relative_gain);
    out << buf << "\n";
  }
  return out.str();
}

void write_comparison_csv(const std::string& path, const std::vector<ComparisonRow>& rows) {
  std::ofstream out(path);
  require_data(out.good(), "cannot write comparison csv: " + path);
  out << comparison_csv(rows);
  require_data(out.good(), "failed writing comparison csv: " + path);
}

}  // namespace satforge::train
