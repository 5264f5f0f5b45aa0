// src/experiment_config.cpp
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

#include "satforge/config/experiment_config.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace satforge::config {

nn::MlpConfig ModelSection::to_mlp_config(std::size_t feat_dim, std::size_t num_classes) const {
  nn::MlpConfig cfg;
  if (preset == "reference") {
    cfg = nn::reference_mlp_config(num_classes);
    return cfg;
  }
  require_data(preset == "desk", "unknown model preset: " + preset);
  cfg.input_dim = feat_dim;
  cfg.hidden_dims.assign(hidden_layers, hidden_units);
  cfg.num_classes = num_classes;
  cfg.hidden_activation = nn::parse_activation(activation);
  cfg.use_batchnorm = batchnorm;
  return cfg;
}

cond::ConditioningSpec ConditioningSection::to_spec() const {
  cond::ConditioningSpec spec;
  spec.mechanism = cond::parse_mechanism(mechanism);
  spec.mode = cond::parse_apply_mode(mode);
  spec.activation = nn::parse_activation(activation);
  spec.shared_units = shared_units;
  spec.use_skip = use_skip;
  spec.constant_scale = constant_scale;
  cond::parse_site(site, spec);
  return spec;
}

std::vector<double> EvaluationSection::sweep_thresholds() const {
  std::vector<double> out;
  std::string text = min_length_sweep;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string tok = text.substr(pos, comma - pos);
    if (!tok.empty()) out.push_back(std::strtod(tok.c_str(), nullptr));
    pos = comma + 1;
  }
  return out;
}

namespace {

const char* kSectionNames[] = {"corpus", "embeddings", "model", "conditioning", "training",
                               "evaluation"};

template <typename Section>
void write_section(std::ostringstream& out, const char* name, Section& section) {
  KvWriter w;
  section.visit(w);
  out << "[" << name << "]\n";
  for (const auto& [key, value] : w.lines()) out << key << " = " << value << "\n";
  out << "\n";
}

}  // namespace

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  ExperimentConfig& self = const_cast<ExperimentConfig&>(*this);
  write_section(out, "corpus", self.corpus);
  write_section(out, "embeddings", self.embeddings);
  write_section(out, "model", self.model);
  write_section(out, "conditioning", self.conditioning);
  write_section(out, "training", self.training);
  write_section(out, "evaluation", self.evaluation);
  return out.str();
}

std::uint64_t ExperimentConfig::fingerprint() const { return fnv1a64(serialize()); }

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::istringstream in(text);
  std::string line, current;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments and surrounding whitespace.
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    if (line.front() == '[') {
      require_data(line.back() == ']', "config line " + std::to_string(line_no) +
                                           ": malformed section header '" + line + "'");
      current = line.substr(1, line.size() - 2);
      bool known = false;
      for (const char* name : kSectionNames)
        if (current == name) known = true;
      require_data(known, "unknown config section: [" + current + "]");
      sections[current];
      continue;
    }
    const std::size_t eq = line.find('=');
    require_data(eq != std::string::npos,
                 "config line " + std::to_string(line_no) + ": expected 'key = value'");
    require_data(!current.empty(),
                 "config line " + std::to_string(line_no) + ": key outside any section");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kend = key.find_last_not_of(" \t");
    key = key.substr(0, kend + 1);
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);
    require_data(!key.empty(), "config line " + std::to_string(line_no) + ": empty key");
    require_data(sections[current].emplace(key, value).second,
                 "duplicate config key '" + key + "' in [" + current + "]");
  }

  ExperimentConfig cfg;
  auto read_section = [&](const char* name, auto& section) {
    auto it = sections.find(name);
    if (it == sections.end()) return;
    KvReader reader(it->second);
    section.visit(reader);
    const auto unknown = reader.unknown_keys();
    require_data(unknown.empty(), "unknown config key '" + (unknown.empty() ? "" : unknown[0]) +
                                      "' in [" + std::string(name) + "]");
  };
  read_section("corpus", cfg.corpus);
  read_section("embeddings", cfg.embeddings);
  read_section("model", cfg.model);
  read_section("conditioning", cfg.conditioning);
  read_section("training", cfg.training);
  read_section("evaluation", cfg.evaluation);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  require_data(in.good(), "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path);
  require_data(out.good(), "cannot write config file: " + path);
  out << serialize();
  require_data(out.good(), "failed writing config file: " + path);
}

void ExperimentConfig::validate() const {
  embeddings.parsed_kind();
  (void)model.to_mlp_config(corpus.feat_dim, corpus.num_classes);
  (void)conditioning.to_spec();
  train::parse_projection_kind(conditioning.projection);
  training.parsed_policy();
  if (evaluation.backend != "all") backend::parse_backend(evaluation.backend);
  require_data(evaluation.non_target_prop >= 0.0 && evaluation.non_target_prop < 1.0,
               "evaluation.non_target_prop must be in [0, 1)");
}

}  // namespace satforge::config
