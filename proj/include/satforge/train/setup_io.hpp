// satforge/train/setup_io.hpp
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

#include "satforge/config/experiment_config.hpp"
#include "satforge/train/trainer.hpp"

namespace satforge::train {

void save_setup(const std::string& path, ModelSetup& setup);

// Rebuilds the architecture from the config (plus the checkpoint's own
// projection shape, which may have been resolved at fit time) and loads the
// tensors. `conditioned` false loads a bare SI model regardless of the
// config's conditioning section.
ModelSetup load_setup(const std::string& path, const config::ExperimentConfig& cfg,
                      const data::Corpus& corpus, bool conditioned);

}  // namespace satforge::train
