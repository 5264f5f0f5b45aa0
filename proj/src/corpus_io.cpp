// src/corpus_io.cpp
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

#include "satforge/data/corpus_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "satforge/nn/checkpoint.hpp"

namespace fs = std::filesystem;

namespace satforge::data {

namespace {

constexpr const char* kManifestName = "manifest.txt";

std::string blob_path(const std::string& dir, const std::string& utt_id) {
  return dir + "/blobs/" + utt_id + ".bin";
}

}  // namespace

void save_corpus(const std::string& dir, const Corpus& corpus) {
  fs::create_directories(fs::path(dir) / "blobs");

  std::ofstream manifest(fs::path(dir) / kManifestName);
  require_data(manifest.good(), "cannot write corpus manifest in " + dir);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(corpus.fingerprint()));
  manifest << "# satforge corpus manifest\n";
  manifest << "# fingerprint " << buf << "\n";
  KvWriter w;
  const_cast<CorpusConfig&>(corpus.config).visit(w);
  for (const auto& [key, value] : w.lines()) manifest << "# config " << key << " " << value << "\n";

  for (const Utterance& u : corpus.utterances) {
    std::snprintf(buf, sizeof(buf), "%.3f", static_cast<double>(u.duration_sec));
    manifest << u.id << " " << u.latents.speaker_id << " " << buf << " " << split_name(u.split)
             << " sess=" << u.latents.session;
    std::snprintf(buf, sizeof(buf), "%.4g", static_cast<double>(u.latents.noise_level));
    manifest << " noise=" << buf << "\n";

    // Labels are small integers; they store exactly in the float container.
    std::vector<float> labels_f(u.labels.begin(), u.labels.end());
    std::vector<float> noise(1, u.latents.noise_level);
    std::vector<TensorView> tensors;
    tensors.push_back(make_view<float>("frames", {u.frames.rows, u.frames.cols},
                                       const_cast<float*>(u.frames.data.data())));
    tensors.push_back(make_view<float>("labels", {labels_f.size()}, labels_f.data()));
    tensors.push_back(make_view<float>("speaker_offset", {u.latents.speaker_offset.size()},
                                       const_cast<float*>(u.latents.speaker_offset.data())));
    tensors.push_back(make_view<float>("channel_scale", {u.latents.channel_scale.size()},
                                       const_cast<float*>(u.latents.channel_scale.data())));
    tensors.push_back(make_view<float>("noise_level", {1}, noise.data()));
    nn::save_checkpoint(blob_path(dir, u.id), tensors);
  }
  require_data(manifest.good(), "failed writing corpus manifest in " + dir);

  std::vector<TensorView> proto;
  proto.push_back(make_view<float>("prototypes",
                                   {corpus.class_prototypes.rows, corpus.class_prototypes.cols},
                                   const_cast<float*>(corpus.class_prototypes.data.data())));
  nn::save_checkpoint((fs::path(dir) / "prototypes.bin").string(), proto);
}

Corpus load_corpus(const std::string& dir) {
  std::ifstream manifest(fs::path(dir) / kManifestName);
  require_data(manifest.good(), "no corpus manifest in " + dir);

  Corpus corpus;
  std::map<std::string, std::string> config_kv;
  std::map<std::string, int> speaker_index;

  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line);
      std::string hash, tag, key, value;
      ls >> hash >> tag;
      if (tag == "config" && (ls >> key >> value)) config_kv[key] = value;
      continue;
    }
    std::istringstream ls(line);
    Utterance u;
    std::string split, duration, extra;
    ls >> u.id >> u.latents.speaker_id >> duration >> split;
    require_data(!u.id.empty() && !split.empty(), "malformed manifest line: '" + line + "'");
    u.split = parse_split(split);
    while (ls >> extra)
      if (extra.rfind("sess=", 0) == 0) u.latents.session = std::atoi(extra.c_str() + 5);
    auto [it, inserted] = speaker_index.try_emplace(
        u.latents.speaker_id, static_cast<int>(corpus.speakers.size()));
    if (inserted) corpus.speakers.push_back(u.latents.speaker_id);
    u.speaker_index = it->second;
    corpus.utterances.push_back(std::move(u));
  }

  KvReader reader(config_kv);
  corpus.config.visit(reader);
  const auto unknown = reader.unknown_keys();
  require_data(unknown.empty(),
               "unknown corpus config key in manifest: " + (unknown.empty() ? "" : unknown[0]));

  for (Utterance& u : corpus.utterances) {
    auto tensors = nn::load_checkpoint(blob_path(dir, u.id));
    auto need = [&](const char* name) -> nn::StoredTensor& {
      auto it = tensors.find(name);
      require_data(it != tensors.end(), "blob for " + u.id + " is missing tensor " + name);
      return it->second;
    };
    nn::StoredTensor& frames = need("frames");
    require_data(frames.dims.size() == 2, "blob frames tensor must be 2-d");
    u.frames = Matrix(frames.dims[0], frames.dims[1]);
    u.frames.data = std::move(frames.values);
    nn::StoredTensor& labels = need("labels");
    u.labels.resize(labels.values.size());
    for (std::size_t i = 0; i < labels.values.size(); ++i)
      u.labels[i] = static_cast<int>(labels.values[i]);
    u.latents.speaker_offset = std::move(need("speaker_offset").values);
    u.latents.channel_scale = std::move(need("channel_scale").values);
    u.latents.noise_level = need("noise_level").values.at(0);
    u.duration_sec = static_cast<float>(u.frames.rows * corpus.config.frame_period_sec);
  }

  auto protos = nn::load_checkpoint((fs::path(dir) / "prototypes.bin").string());
  auto it = protos.find("prototypes");
  require_data(it != protos.end() && it->second.dims.size() == 2, "bad prototypes file in " + dir);
  corpus.class_prototypes = Matrix(it->second.dims[0], it->second.dims[1]);
  corpus.class_prototypes.data = std::move(it->second.values);
  return corpus;
}

std::uint64_t read_corpus_fingerprint(const std::string& dir) {
  std::ifstream manifest(fs::path(dir) / kManifestName);
  require_data(manifest.good(), "no corpus manifest in " + dir);
  std::string line;
  while (std::getline(manifest, line)) {
    std::istringstream ls(line);
    std::string hash, tag, value;
    if ((ls >> hash >> tag >> value) && hash == "#" && tag == "fingerprint")
      return std::strtoull(value.c_str(), nullptr, 16);
  }
  throw DataError("corpus manifest in " + dir + " has no fingerprint");
}

}  // namespace satforge::data
