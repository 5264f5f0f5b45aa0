// satforge/data/corpus_io.hpp
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

#include "satforge/data/corpus.hpp"

namespace satforge::data {

// On-disk corpus: a manifest (config header plus one line per utterance)
// and per-utterance tensor blobs holding frames, labels and exact latents.
void save_corpus(const std::string& dir, const Corpus& corpus);

Corpus load_corpus(const std::string& dir);

// Fingerprint recorded in `dir`'s manifest, without loading the blobs.
std::uint64_t read_corpus_fingerprint(const std::string& dir);

}  // namespace satforge::data
