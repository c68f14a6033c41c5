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

#include "mdtrack/trainer.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "mdtrack/errors.h"
#include "mdtrack/ops.h"
#include "mdtrack/optim.h"

namespace mdtrack {

TrainingSample training_sample(const TrackerModel& model, const FramePair& pair,
                               const TrainConfig& config, Rng& rng) {
  const CropSpec window = model.config().crop_for(pair.prev_box);
  if (config.augment) return augment(pair, config.augment_options, window, rng);
  return make_sample(pair, pair.prev_box, window);
}

Tensor sample_loss(const TrackerModel& model, const TrainingSample& sample) {
  // Ratio crops depend only on the box size, which augmentation preserves.
  const CropSpec window = model.config().crop_for(sample.prev_box);
  const Tensor pred = model.head_forward(
      model.backbone_forward(model.encode(sample.prev, window), model.encode(sample.curr, window)));
  return motion_loss(pred, sample.target, model.config().loss);
}

EpochStats train_epoch(TrackerModel& model, std::span<const FramePair> data,
                       const TrainConfig& config, std::size_t epoch, Rng& rng,
                       std::size_t step_budget) {
  if (config.batch == 0) throw ConfigError("batch must be positive");
  EpochStats stats;
  stats.epoch = epoch;
  stats.lr = step_decay_lr(config.lr, static_cast<int>(epoch), config.decay_factor,
                           static_cast<int>(config.decay_interval));
  const AdamWOptions opt{.lr = stats.lr, .weight_decay = config.weight_decay};

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());

  double loss_sum = 0.0;
  std::size_t seen = 0;
  for (std::size_t start = 0; start < order.size() && stats.steps < step_budget;
       start += config.batch) {
    const std::size_t end = std::min(order.size(), start + config.batch);
    const double inv = 1.0 / static_cast<double>(end - start);
    try {
      for (std::size_t i = start; i < end; ++i) {
        const TrainingSample sample = training_sample(model, data[order[i]], config, rng);
        const Tensor loss = sample_loss(model, sample);
        loss_sum += loss.item();
        ++seen;
        scale(loss, inv).backward();
      }
      adamw_step(model.params(), opt);
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + " step " +
                         std::to_string(stats.steps) + ": " + e.what());
    }
    ++stats.steps;
  }
  stats.loss_mean = seen ? loss_sum / static_cast<double>(seen) : 0.0;
  stats.alphas = model.alphas();
  return stats;
}

std::vector<EpochStats> train(TrackerModel& model, std::span<const FramePair> data,
                              const TrainConfig& config,
                              const std::function<void(const EpochStats&)>& on_epoch) {
  Rng rng(config.seed);
  std::vector<EpochStats> history;
  std::size_t steps = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const std::size_t budget = config.max_steps ? config.max_steps - steps : SIZE_MAX;
    if (budget == 0) break;
    history.push_back(train_epoch(model, data, config, epoch, rng, budget));
    steps += history.back().steps;
    if (on_epoch) on_epoch(history.back());
  }
  return history;
}

double dataset_loss(const TrackerModel& model, std::span<const FramePair> data) {
  if (data.empty()) return 0.0;
  NoGradGuard no_grad;
  double total = 0.0;
  for (const FramePair& pair : data) {
    const TrainingSample sample =
        make_sample(pair, pair.prev_box, model.config().crop_for(pair.prev_box));
    total += sample_loss(model, sample).item();
  }
  return total / static_cast<double>(data.size());
}

std::vector<GradcheckReport> model_gradcheck(TrackerModel& model, const SceneConfig& scene,
                                             GradcheckOptions options) {
  SceneConfig sc = scene;
  sc.frames = 2;
  const LabeledSequence seq = generate(sc);
  const FramePair pair{&seq.frames[0], &seq.frames[1], seq.gt[0], seq.gt[1]};
  const TrainingSample sample =
      make_sample(pair, pair.prev_box, model.config().crop_for(pair.prev_box));
  return gradcheck_params([&] { return sample_loss(model, sample); }, model.params(), options);
}

}  // namespace mdtrack
