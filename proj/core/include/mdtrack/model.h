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

#ifndef MDTRACK_MODEL_H_
#define MDTRACK_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mdtrack/focus_block.h"
#include "mdtrack/geometry.h"
#include "mdtrack/param_store.h"
#include "mdtrack/pillar.h"
#include "mdtrack/tensor.h"

namespace mdtrack {

struct LossWeights {
  double xy = 1.0;     // lambda1
  double z = 1.0;      // lambda2
  double theta = 1.0;  // lambda3
  double huber_delta = 1.0;
};

struct ModelConfig {
  CropSpec crop = CropSpec::car(32);
  // When positive, crop a window of this many box footprints around the
  // reference box instead of the fixed `crop` ranges (grid size is kept).
  double crop_ratio = 0.0;
  std::size_t channels = 8;  // pillar output width C
  std::size_t heads = 1;
  std::size_t stages = 3;
  std::array<std::size_t, 3> head_widths{64, 64, 64};
  std::size_t mlp_width = 64;
  std::size_t ffn_expansion = 2;
  double alpha_init = 0.5;
  BlockToggles toggles;
  LossWeights loss;

  // 32x32 grid, C=8, one head: small enough to train on a laptop CPU.
  static ModelConfig desk();
  // 128x128, C=16, 16x16x128 backbone output, 1x1x512 head features.
  static ModelConfig full_scale();
  // 16x16, C=4: the gradient-check configuration.
  static ModelConfig tiny();
  // Backbone downsample ratio 2, 4, 8 or 16 on a 128x128 grid.
  static ModelConfig downsample_preset(int ratio);

  std::size_t grid() const { return crop.grid_h; }
  CropSpec crop_for(const Box3D& reference) const;
  void validate() const;
};

// Spatial size after one head conv block (3x3, stride 2; unpadded when the
// input is at least 3 wide, padded by one otherwise).
std::size_t head_block_output(std::size_t in);
int head_block_padding(std::size_t in);

// Static shape bookkeeping of the whole network.
struct StageShape {
  std::size_t h = 0, w = 0, c = 0;

  friend bool operator==(const StageShape&, const StageShape&) = default;
};

struct ArchitecturePlan {
  StageShape pillar;               // pillarized input grid
  std::vector<StageShape> stages;  // input of each block
  StageShape backbone_out;         // after the last downsample conv
  std::vector<StageShape> head;    // after each head conv block
  std::size_t head_features = 0;   // flattened head width
};

ArchitecturePlan plan_architecture(const ModelConfig& config);

// Predicted motion tensor layout: [dx, dy, dz, dtheta].
inline constexpr std::size_t kMotionDims = 4;

Motion4 to_motion(const Tensor& prediction);

// lambda1 * Huber(dx, dy) + lambda2 * Huber(dz) + lambda3 * Huber(wrap(dtheta)).
Tensor motion_loss(const Tensor& prediction, const Motion4& target,
                   const LossWeights& weights);

struct BackboneTrace {
  std::vector<BlockOutput> blocks;
};

// Pillar encoder, stacked blocks with shared stride-2 downsampling, and the
// multi-task regression head, all backed by one ParamStore.
class TrackerModel {
 public:
  TrackerModel(ModelConfig config, std::uint64_t seed);
  // Adopts existing parameters; names and shapes must match the config.
  TrackerModel(ModelConfig config, ParamStore params);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Clouds must be canonical and already cropped to config().crop.
  BevFeature encode(const PointCloud& cloud) const;
  BevFeature encode(const PointCloud& cloud, const CropSpec& window) const;
  Tensor backbone_forward(const BevFeature& prev, const BevFeature& curr,
                          BackboneTrace* trace = nullptr) const;
  // [H' x W' x C'] -> [4] motion prediction.
  Tensor head_forward(const Tensor& features) const;
  Tensor forward(const PointCloud& prev, const PointCloud& curr) const;

  // Learned alpha per stage (empty when the imm module is disabled).
  std::vector<double> alphas() const;

  std::size_t block_count() const { return blocks_.size(); }
  const BlockParams& block(std::size_t s) const { return blocks_.at(s); }

 private:
  void bind();

  ModelConfig config_;
  ParamStore params_;
  PillarParams pillar_;
  std::vector<BlockParams> blocks_;
  std::vector<Tensor> down_w_, down_b_;
  std::vector<Tensor> head_w_, head_b_;
  Tensor mlp_w_, mlp_b_, xy_w_, xy_b_, z_w_, z_b_, rot_w_, rot_b_;
};

}  // namespace mdtrack

#endif  // MDTRACK_MODEL_H_
