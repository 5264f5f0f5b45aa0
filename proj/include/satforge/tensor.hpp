// satforge/tensor.hpp
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
#include <string>
#include <vector>

namespace satforge {

// Named, shaped view over parameter (or gradient) storage. The checkpoint
// format and the optimizer both address tensors through these.
template <typename T>
struct TensorViewT {
  std::string name;
  std::vector<std::size_t> dims;
  T* data = nullptr;
  std::size_t size = 0;
};

using TensorView = TensorViewT<float>;

template <typename T>
TensorViewT<T> make_view(std::string name, std::vector<std::size_t> dims, T* data) {
  std::size_t n = 1;
  for (std::size_t d : dims) n *= d;
  return TensorViewT<T>{std::move(name), std::move(dims), data, n};
}

}  // namespace satforge
