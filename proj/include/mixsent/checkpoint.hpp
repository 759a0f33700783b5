// Copyright 2026 The mixsent Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIXSENT_CHECKPOINT_HPP
#define MIXSENT_CHECKPOINT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "mixsent/encoders.hpp"
#include "mixsent/trainer.hpp"

namespace mixsent {

inline constexpr int kCheckpointVersion = 1;

/// Line-oriented dump: a version line, the training config and model
/// config as JSON, then one `tensor <name> <shape>` line per parameter
/// followed by its values as hexfloats.
struct Checkpoint {
  TrainConfig config;
  ModelConfig model;
  std::vector<NamedParam> tensors;
};

void save_checkpoint(const std::filesystem::path& path, const Model& model, const TrainConfig& config);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies checkpointed values into `model`; names and shapes must match.
void restore_parameters(Model& model, const Checkpoint& checkpoint);

}  // namespace mixsent

#endif  // MIXSENT_CHECKPOINT_HPP
