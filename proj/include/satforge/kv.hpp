// satforge/kv.hpp
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

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "satforge/errors.hpp"

namespace satforge {

// Canonical text forms for config values. Floats print with enough digits
// to round-trip exactly, so parse -> serialize -> parse is the identity.
inline std::string kv_format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string kv_format(float v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

inline std::string kv_format(bool v) { return v ? "true" : "false"; }
inline std::string kv_format(std::uint64_t v) { return std::to_string(v); }
inline std::string kv_format(int v) { return std::to_string(v); }
inline std::string kv_format(const std::string& v) { return v; }

inline void kv_parse(const std::string& text, double& out) { out = std::strtod(text.c_str(), nullptr); }
inline void kv_parse(const std::string& text, float& out) { out = std::strtof(text.c_str(), nullptr); }
inline void kv_parse(const std::string& text, bool& out) {
  if (text == "true" || text == "1") {
    out = true;
  } else if (text == "false" || text == "0") {
    out = false;
  } else {
    throw DataError("expected a boolean, got '" + text + "'");
  }
}
inline void kv_parse(const std::string& text, std::uint64_t& out) {
  out = std::strtoull(text.c_str(), nullptr, 10);
}
inline void kv_parse(const std::string& text, int& out) {
  out = static_cast<int>(std::strtol(text.c_str(), nullptr, 10));
}
inline void kv_parse(const std::string& text, std::string& out) { out = text; }

// A visitor receives (key, value reference) pairs; serialization, parsing,
// fingerprinting and defaulting all walk the same field tables.
class KvWriter {
 public:
  template <typename T>
  void field(const std::string& key, T& value) {
    lines_.emplace_back(key, kv_format(value));
  }

  // Enum-ish fields go through explicit string codecs.
  void field_str(const std::string& key, const std::string& value) {
    lines_.emplace_back(key, value);
  }

  const std::vector<std::pair<std::string, std::string>>& lines() const { return lines_; }

 private:
  std::vector<std::pair<std::string, std::string>> lines_;
};

class KvReader {
 public:
  explicit KvReader(const std::map<std::string, std::string>& values) : values_(values) {}

  template <typename T>
  void field(const std::string& key, T& value) {
    auto it = values_.find(key);
    if (it != values_.end()) {
      kv_parse(it->second, value);
      seen_.push_back(key);
    }
  }

  void field_str(const std::string& key, const std::function<void(const std::string&)>& setter) {
    auto it = values_.find(key);
    if (it != values_.end()) {
      setter(it->second);
      seen_.push_back(key);
    }
  }

  // Keys present in the input but never consumed by a field table.
  std::vector<std::string> unknown_keys() const {
    std::vector<std::string> unknown;
    for (const auto& [k, v] : values_) {
      (void)v;
      bool found = false;
      for (const auto& s : seen_)
        if (s == k) found = true;
      if (!found) unknown.push_back(k);
    }
    return unknown;
  }

 private:
  const std::map<std::string, std::string>& values_;
  std::vector<std::string> seen_;
};

}  // namespace satforge
