// Copyright 2026 The mdtrack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDTRACK_CONFIG_H_
#define MDTRACK_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "mdtrack/model.h"
#include "mdtrack/scene.h"
#include "mdtrack/sequence_io.h"
#include "mdtrack/trainer.h"

namespace mdtrack {

// Everything a command needs; reproducible from its echo.
struct RunConfig {
  std::string preset = "desk";  // desk, tiny or full; applied before other keys
  ModelConfig model = ModelConfig::desk();
  SceneConfig scene = [] {
    SceneConfig s;
    s.seed = 1;
    s.frames = 11;
    return s;
  }();
  TrainConfig train = [] {
    TrainConfig t;
    t.max_steps = 200;
    return t;
  }();
  std::size_t train_sequences = 20;
  std::size_t val_sequences = 20;
  std::size_t val_frames = 20;
  std::uint64_t seed = 1;      // model init, training draws, training scenes
                               // (copied into scene.seed and train.seed)
  std::uint64_t val_seed = 2;  // held-out scenes
  std::size_t gradcheck_entries = 256;  // per parameter tensor; 0 = all
  double gradcheck_eps = 1e-5;          // central-difference step
  int gradcheck_stencil = 4;            // 2- or 4-point central difference
  std::string out_dir = "runs";
};

// `key = value` lines; `#` starts a comment. Throws ConfigError naming the
// source and line for malformed lines or duplicate keys.
KeyValues parse_key_values(std::string_view text, const std::string& source);
KeyValues read_key_values(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);

// Applies one key. Throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

// Preset first, then every other key in order; validates the result.
RunConfig make_run_config(const KeyValues& kv);

// Every key with its current value, in schema order.
KeyValues echo_config(const RunConfig& config);

// Documented schema: key and one-line description.
KeyValues config_schema();

}  // namespace mdtrack

#endif  // MDTRACK_CONFIG_H_
