// src/checkpoint.cpp
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

#include "satforge/nn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "satforge/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint i/o assumes a little-endian host");
static_assert(sizeof(float) == 4, "checkpoint i/o assumes 32-bit floats");

namespace satforge::nn {

void save_checkpoint(const std::string& path, const std::vector<TensorView>& tensors) {
  std::ofstream out(path, std::ios::binary);
  require_data(out.good(), "cannot open checkpoint for writing: " + path);
  out << kCheckpointMagic << "\n";
  for (const TensorView& t : tensors) {
    require_data(t.name.find(' ') == std::string::npos && !t.name.empty(),
                 "invalid tensor name: '" + t.name + "'");
    out << t.name;
    for (std::size_t d : t.dims) out << " " << d;
    out << "\n";
  }
  out << "\n";
  for (const TensorView& t : tensors)
    out.write(reinterpret_cast<const char*>(t.data),
              static_cast<std::streamsize>(t.size * sizeof(float)));
  require_data(out.good(), "failed writing checkpoint: " + path);
}

std::map<std::string, StoredTensor> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require_data(in.good(), "cannot open checkpoint: " + path);
  std::string line;
  require_data(static_cast<bool>(std::getline(in, line)) && line == kCheckpointMagic,
               "bad checkpoint magic in " + path);
  std::vector<std::pair<std::string, std::vector<std::size_t>>> header;
  while (std::getline(in, line) && !line.empty()) {
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    std::vector<std::size_t> dims;
    std::size_t d;
    while (ls >> d) dims.push_back(d);
    require_data(!name.empty(), "malformed checkpoint header line: '" + line + "'");
    header.emplace_back(std::move(name), std::move(dims));
  }
  std::map<std::string, StoredTensor> tensors;
  for (auto& [name, dims] : header) {
    std::size_t n = 1;
    for (std::size_t d : dims) n *= d;
    StoredTensor t;
    t.dims = dims;
    t.values.resize(n);
    in.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(n * sizeof(float)));
    require_data(in.gcount() == static_cast<std::streamsize>(n * sizeof(float)),
                 "checkpoint truncated at tensor " + name);
    require_data(tensors.emplace(name, std::move(t)).second,
                 "duplicate tensor in checkpoint: " + name);
  }
  return tensors;
}

void load_checkpoint_into(const std::string& path, const std::vector<TensorView>& views) {
  auto tensors = load_checkpoint(path);
  for (const TensorView& v : views) {
    auto it = tensors.find(v.name);
    require_data(it != tensors.end(), "checkpoint " + path + " is missing tensor " + v.name);
    require_data(it->second.dims == v.dims, "checkpoint tensor " + v.name + " has wrong shape");
    std::copy(it->second.values.begin(), it->second.values.end(), v.data);
  }
}

}  // namespace satforge::nn
