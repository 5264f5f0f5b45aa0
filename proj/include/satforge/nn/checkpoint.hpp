// satforge/nn/checkpoint.hpp
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
#include <map>
#include <string>
#include <vector>

#include "satforge/tensor.hpp"

namespace satforge::nn {

// Tensor container: the magic line, one "name dim0 dim1 ..." text line per
// tensor, a blank line, then raw little-endian float32 data in header order.
// Round-trips are bit-exact.
inline constexpr const char* kCheckpointMagic = "SATFORGE1";

struct StoredTensor {
  std::vector<std::size_t> dims;
  std::vector<float> values;
};

void save_checkpoint(const std::string& path, const std::vector<TensorView>& tensors);

std::map<std::string, StoredTensor> load_checkpoint(const std::string& path);

// Loads into existing views; every view must be present with matching dims.
void load_checkpoint_into(const std::string& path, const std::vector<TensorView>& tensors);

}  // namespace satforge::nn
