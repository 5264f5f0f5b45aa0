// satforge/nn/activation.hpp
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

#include <cmath>
#include <string>

#include "satforge/errors.hpp"

namespace satforge::nn {

enum class Activation { kRelu, kSigmoid, kTanh, kLinear };

template <typename T>
T activate(Activation act, T z) {
  switch (act) {
    case Activation::kRelu:
      return z > T(0) ? z : T(0);
    case Activation::kSigmoid:
      return T(1) / (T(1) + std::exp(-z));
    case Activation::kTanh:
      return std::tanh(z);
    case Activation::kLinear:
      return z;
  }
  return z;
}

// Derivative given pre-activation z and output y = activate(act, z).
template <typename T>
T activation_grad(Activation act, T z, T y) {
  switch (act) {
    case Activation::kRelu:
      return z > T(0) ? T(1) : T(0);
    case Activation::kSigmoid:
      return y * (T(1) - y);
    case Activation::kTanh:
      return T(1) - y * y;
    case Activation::kLinear:
      return T(1);
  }
  return T(1);
}

inline std::string activation_name(Activation act) {
  switch (act) {
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kLinear: return "linear";
  }
  return "linear";
}

inline Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  if (name == "linear") return Activation::kLinear;
  throw DataError("unknown activation: " + name);
}

}  // namespace satforge::nn
