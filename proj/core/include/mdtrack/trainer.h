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

#ifndef MDTRACK_TRAINER_H_
#define MDTRACK_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mdtrack/gradcheck.h"
#include "mdtrack/model.h"
#include "mdtrack/scene.h"

namespace mdtrack {

struct TrainConfig {
  double lr = 1e-3;
  double weight_decay = 0.01;
  std::size_t batch = 4;
  std::size_t epochs = 8;
  std::size_t max_steps = 0;  // optimizer steps across all epochs; 0 = no cap
  double decay_factor = 5.0;
  std::size_t decay_interval = 20;  // epochs
  bool augment = true;
  AugmentOptions augment_options{.reference_jitter = 0.3};
  std::uint64_t seed = 1;  // shuffling and augmentation draws
};

struct EpochStats {
  std::size_t epoch = 0;
  double lr = 0.0;
  double loss_mean = 0.0;  // over the samples seen this epoch, before each step
  std::size_t steps = 0;
  std::vector<double> alphas;  // per stage, after the epoch
};

// Crop-frame sample for one pair: augmented when `augment` is set.
TrainingSample training_sample(const TrackerModel& model, const FramePair& pair,
                               const TrainConfig& config, Rng& rng);

// Loss of one sample under the model's loss weights.
Tensor sample_loss(const TrackerModel& model, const TrainingSample& sample);

// One pass over a shuffled copy of `data` in mini-batches, at most
// `step_budget` optimizer steps. Throws NumericError naming the epoch and
// step when a loss or gradient becomes non-finite.
EpochStats train_epoch(TrackerModel& model, std::span<const FramePair> data,
                       const TrainConfig& config, std::size_t epoch, Rng& rng,
                       std::size_t step_budget = SIZE_MAX);

// Runs epochs until `config.epochs` or `config.max_steps` is reached.
std::vector<EpochStats> train(TrackerModel& model, std::span<const FramePair> data,
                              const TrainConfig& config,
                              const std::function<void(const EpochStats&)>& on_epoch = {});

// Mean unaugmented loss over `data`, crops centered on the true previous box.
double dataset_loss(const TrackerModel& model, std::span<const FramePair> data);

// Central-difference check of the full loss (pillars, blocks, head) against
// every parameter tensor, on the first pair of a sequence drawn from `scene`.
std::vector<GradcheckReport> model_gradcheck(TrackerModel& model, const SceneConfig& scene,
                                             GradcheckOptions options = {});

}  // namespace mdtrack

#endif  // MDTRACK_TRAINER_H_
