// satforge/cond/spec.hpp
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

#include "satforge/errors.hpp"
#include "satforge/nn/activation.hpp"

namespace satforge::cond {

// The ladder of embedding-incorporation mechanisms, ordered by how many
// parameters act on the embedding: a multi-layer control network, a single
// control layer, a per-dimension control vector, a single control variable,
// a fixed constant scale, and plain concatenation with the input features.
enum class Mechanism {
  kNone,
  kControlNetwork,
  kControlLayer,
  kControlVector,
  kControlVariable,
  kConstantScale,
  kConcatenate,
};

enum class ApplyMode { kShift, kScale };

enum class SiteSelection { kInputOnly, kAllHidden, kLayerSet };

struct ConditioningSpec {
  Mechanism mechanism = Mechanism::kNone;
  ApplyMode mode = ApplyMode::kShift;                      // control layer only
  nn::Activation activation = nn::Activation::kLinear;    // control layer only
  std::size_t shared_units = 100;                          // control network trunk width
  bool use_skip = true;                                    // control network residual path
  float constant_scale = 0.1f;
  SiteSelection site = SiteSelection::kInputOnly;
  std::vector<std::size_t> layer_set;                      // used when site == kLayerSet

  bool enabled() const { return mechanism != Mechanism::kNone; }
};

// Site ids: 0 is the input features, l >= 1 is the activation output of
// hidden layer l. `num_layers` counts dense layers including the output
// layer, so hidden sites are 1 .. num_layers - 1.
inline std::vector<std::size_t> resolve_sites(const ConditioningSpec& spec,
                                              std::size_t num_layers) {
  switch (spec.site) {
    case SiteSelection::kInputOnly:
      return {0};
    case SiteSelection::kAllHidden: {
      require(spec.mechanism != Mechanism::kConcatenate,
              "concatenation applies to the input features only");
      std::vector<std::size_t> sites;
      for (std::size_t l = 1; l < num_layers; ++l) sites.push_back(l);
      return sites;
    }
    case SiteSelection::kLayerSet: {
      require(!spec.layer_set.empty(), "layer_set site selection is empty");
      for (std::size_t l : spec.layer_set) {
        require(l < num_layers, "layer_set site out of range");
        require(!(spec.mechanism == Mechanism::kConcatenate && l != 0),
                "concatenation applies to the input features only");
      }
      return spec.layer_set;
    }
  }
  return {0};
}

// Exact trainable-parameter count of the conditioning mechanism alone.
inline std::size_t count_conditioning_params(const ConditioningSpec& spec,
                                             std::size_t embed_dim,
                                             const std::vector<std::size_t>& site_dims) {
  switch (spec.mechanism) {
    case Mechanism::kNone:
    case Mechanism::kConstantScale:
    case Mechanism::kConcatenate:
      return 0;
    case Mechanism::kControlVariable:
      return site_dims.size();
    case Mechanism::kControlVector: {
      std::size_t n = 0;
      for (std::size_t d : site_dims) n += d;
      return n;
    }
    case Mechanism::kControlLayer: {
      std::size_t n = 0;
      for (std::size_t d : site_dims) n += embed_dim * d + d;
      return n;
    }
    case Mechanism::kControlNetwork: {
      const std::size_t u = spec.shared_units;
      std::size_t n = embed_dim * u + u + u * u + u;  // shared trunk
      for (std::size_t d : site_dims) n += 2 * (u * d + d);  // scale + bias heads
      return n;
    }
  }
  return 0;
}

inline std::string mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::kNone: return "none";
    case Mechanism::kControlNetwork: return "ctrl-network";
    case Mechanism::kControlLayer: return "ctrl-layer";
    case Mechanism::kControlVector: return "ctrl-vector";
    case Mechanism::kControlVariable: return "ctrl-variable";
    case Mechanism::kConstantScale: return "const-scale";
    case Mechanism::kConcatenate: return "concat";
  }
  return "none";
}

inline Mechanism parse_mechanism(const std::string& name) {
  if (name == "none") return Mechanism::kNone;
  if (name == "ctrl-network") return Mechanism::kControlNetwork;
  if (name == "ctrl-layer") return Mechanism::kControlLayer;
  if (name == "ctrl-vector") return Mechanism::kControlVector;
  if (name == "ctrl-variable") return Mechanism::kControlVariable;
  if (name == "const-scale") return Mechanism::kConstantScale;
  if (name == "concat") return Mechanism::kConcatenate;
  throw DataError("unknown conditioning mechanism: " + name);
}

inline std::string apply_mode_name(ApplyMode m) {
  return m == ApplyMode::kShift ? "shift" : "scale";
}

inline ApplyMode parse_apply_mode(const std::string& name) {
  if (name == "shift") return ApplyMode::kShift;
  if (name == "scale") return ApplyMode::kScale;
  throw DataError("unknown conditioning mode: " + name);
}

inline std::string site_name(const ConditioningSpec& spec) {
  switch (spec.site) {
    case SiteSelection::kInputOnly: return "input";
    case SiteSelection::kAllHidden: return "hidden";
    case SiteSelection::kLayerSet: {
      std::string s = "layers:";
      for (std::size_t i = 0; i < spec.layer_set.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(spec.layer_set[i]);
      }
      return s;
    }
  }
  return "input";
}

inline void parse_site(const std::string& name, ConditioningSpec& spec) {
  if (name == "input") {
    spec.site = SiteSelection::kInputOnly;
    return;
  }
  if (name == "hidden") {
    spec.site = SiteSelection::kAllHidden;
    return;
  }
  if (name.rfind("layers:", 0) == 0) {
    spec.site = SiteSelection::kLayerSet;
    spec.layer_set.clear();
    std::string rest = name.substr(7);
    std::size_t pos = 0;
    while (pos < rest.size()) {
      std::size_t comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      const std::string tok = rest.substr(pos, comma - pos);
      require_data(!tok.empty(), "empty layer index in site spec: " + name);
      spec.layer_set.push_back(static_cast<std::size_t>(std::stoul(tok)));
      pos = comma + 1;
    }
    require_data(!spec.layer_set.empty(), "no layer indices in site spec: " + name);
    return;
  }
  throw DataError("unknown conditioning site: " + name);
}

}  // namespace satforge::cond
