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

#include "mdtrack/model.h"

#include <bit>
#include <cmath>

#include "mdtrack/errors.h"
#include "mdtrack/ops.h"

namespace mdtrack {
namespace {

std::string stage_prefix(std::size_t s) { return "stage" + std::to_string(s + 1); }

BlockConfig block_config(const ModelConfig& m, std::size_t s) {
  BlockConfig b;
  b.grid_h = m.crop.grid_h >> s;
  b.grid_w = m.crop.grid_w >> s;
  b.channels = m.channels << s;
  b.heads = m.heads;
  b.ffn_expansion = m.ffn_expansion;
  b.alpha_init = m.alpha_init;
  b.toggles = m.toggles;
  return b;
}

}  // namespace

ModelConfig ModelConfig::desk() { return ModelConfig{}; }

ModelConfig ModelConfig::full_scale() {
  ModelConfig c;
  c.crop = CropSpec::car(128);
  c.channels = 16;
  c.head_widths = {256, 512, 512};
  c.mlp_width = 256;
  return c;
}

ModelConfig ModelConfig::tiny() {
  ModelConfig c;
  c.crop = CropSpec::car(16);
  c.channels = 4;
  c.head_widths = {32, 32, 32};
  c.mlp_width = 32;
  return c;
}

ModelConfig ModelConfig::downsample_preset(int ratio) {
  if (ratio < 2 || ratio > 16 || !std::has_single_bit(static_cast<unsigned>(ratio))) {
    throw ConfigError("downsample ratio must be 2, 4, 8 or 16");
  }
  ModelConfig c = full_scale();
  c.stages = static_cast<std::size_t>(std::countr_zero(static_cast<unsigned>(ratio)));
  return c;
}

std::size_t head_block_output(std::size_t in) {
  return conv_output_size(in, 2, head_block_padding(in));
}

int head_block_padding(std::size_t in) { return in >= 3 ? 0 : 1; }

ArchitecturePlan plan_architecture(const ModelConfig& m) {
  ArchitecturePlan plan;
  plan.pillar = {m.crop.grid_h, m.crop.grid_w, m.channels};
  StageShape cur = plan.pillar;
  for (std::size_t s = 0; s < m.stages; ++s) {
    plan.stages.push_back(cur);
    cur = {conv_output_size(cur.h, 2, 1), conv_output_size(cur.w, 2, 1), cur.c * 2};
  }
  plan.backbone_out = cur;
  for (std::size_t width : m.head_widths) {
    cur = {head_block_output(cur.h), head_block_output(cur.w), width};
    plan.head.push_back(cur);
  }
  plan.head_features = cur.h * cur.w * cur.c;
  return plan;
}

CropSpec ModelConfig::crop_for(const Box3D& reference) const {
  if (crop_ratio <= 0.0) return crop;
  CropSpec window = CropSpec::around_box(reference, crop_ratio, crop.grid_h);
  window.z_range = crop.z_range;
  return window;
}

void ModelConfig::validate() const {
  crop.validate();
  if (!(crop_ratio >= 0.0) || !std::isfinite(crop_ratio)) {
    throw ConfigError("crop ratio must be zero (fixed window) or positive");
  }
  if (crop.grid_h != crop.grid_w) throw ConfigError("the BEV grid must be square");
  if (channels == 0) throw ConfigError("channels must be positive");
  if (heads == 0 || channels % heads != 0) {
    throw ConfigError("channels must be divisible by heads");
  }
  if (stages == 0 || (crop.grid_h >> stages) == 0 || (crop.grid_w >> stages) == 0) {
    throw ConfigError("grid " + std::to_string(crop.grid_h) + " cannot be halved " +
                      std::to_string(stages) + " times");
  }
  for (std::size_t w : head_widths) {
    if (w == 0) throw ConfigError("head widths must be positive");
  }
  if (mlp_width == 0 || ffn_expansion == 0) {
    throw ConfigError("mlp width and ffn expansion must be positive");
  }
  const ArchitecturePlan plan = plan_architecture(*this);
  if (plan.head.back().h != 1 || plan.head.back().w != 1) {
    throw ConfigError("backbone output " + std::to_string(plan.backbone_out.h) + "x" +
                      std::to_string(plan.backbone_out.w) +
                      " does not reduce to 1x1 in three head conv blocks");
  }
}

Motion4 to_motion(const Tensor& prediction) {
  if (prediction.numel() != kMotionDims) {
    throw ShapeError("motion prediction must have 4 elements");
  }
  return {prediction[0], prediction[1], prediction[2], prediction[3]};
}

Tensor motion_loss(const Tensor& prediction, const Motion4& target,
                   const LossWeights& weights) {
  for (double v : {target.dx, target.dy, target.dz, target.dtheta}) {
    if (!std::isfinite(v)) throw NumericError("non-finite motion target");
  }
  if (prediction.numel() != kMotionDims) {
    throw ShapeError("motion prediction must have 4 elements");
  }
  const double delta = weights.huber_delta;
  const Tensor xy = sub(slice(prediction, 0, 2), Tensor::from_data({2}, {target.dx, target.dy}));
  const Tensor z = sub(slice(prediction, 2, 3), Tensor::from_data({1}, {target.dz}));
  const Tensor rot =
      wrap_angle(sub(slice(prediction, 3, 4), Tensor::from_data({1}, {target.dtheta})));
  return add(add(scale(sum(huber(xy, delta)), weights.xy),
                 scale(sum(huber(z, delta)), weights.z)),
             scale(sum(huber(rot, delta)), weights.theta));
}

TrackerModel::TrackerModel(ModelConfig config, std::uint64_t seed)
    : config_(std::move(config)) {
  config_.validate();
  Rng rng(seed);
  PillarParams::create(params_, "pillar", config_.channels, rng);
  for (std::size_t s = 0; s < config_.stages; ++s) {
    const BlockConfig bc = block_config(config_, s);
    BlockParams::create(params_, stage_prefix(s), bc, rng);
    const std::size_t c = bc.channels;
    params_.add_fan_in(stage_prefix(s) + ".down.w", {3, 3, c, 2 * c}, 9 * c, rng);
    params_.add_zeros(stage_prefix(s) + ".down.b", {2 * c});
  }
  std::size_t in = config_.channels << config_.stages;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t out = config_.head_widths[i];
    const std::string p = "head.conv" + std::to_string(i + 1);
    params_.add_fan_in(p + ".w", {3, 3, in, out}, 9 * in, rng);
    params_.add_zeros(p + ".b", {out});
    in = out;
  }
  auto dense = [&](const std::string& name, std::size_t fan_in, std::size_t out) {
    params_.add_fan_in(name + ".w", {fan_in, out}, fan_in, rng);
    params_.add_zeros(name + ".b", {out});
  };
  dense("head.mlp", in, config_.mlp_width);
  dense("head.xy", config_.mlp_width, 2);
  dense("head.z", config_.mlp_width, 1);
  dense("head.rot", config_.mlp_width, 1);
  bind();
}

TrackerModel::TrackerModel(ModelConfig config, ParamStore params)
    : config_(std::move(config)) {
  config_.validate();
  TrackerModel reference(config_, 0);
  reference.params().assign_from(params);  // validates names and shapes
  params_ = std::move(params);
  bind();
}

void TrackerModel::bind() {
  pillar_ = PillarParams::bind(params_, "pillar");
  blocks_.clear();
  down_w_.clear();
  down_b_.clear();
  for (std::size_t s = 0; s < config_.stages; ++s) {
    blocks_.push_back(BlockParams::bind(params_, stage_prefix(s), block_config(config_, s)));
    down_w_.push_back(params_.at(stage_prefix(s) + ".down.w"));
    down_b_.push_back(params_.at(stage_prefix(s) + ".down.b"));
  }
  head_w_.clear();
  head_b_.clear();
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string p = "head.conv" + std::to_string(i + 1);
    head_w_.push_back(params_.at(p + ".w"));
    head_b_.push_back(params_.at(p + ".b"));
  }
  mlp_w_ = params_.at("head.mlp.w");
  mlp_b_ = params_.at("head.mlp.b");
  xy_w_ = params_.at("head.xy.w");
  xy_b_ = params_.at("head.xy.b");
  z_w_ = params_.at("head.z.w");
  z_b_ = params_.at("head.z.b");
  rot_w_ = params_.at("head.rot.w");
  rot_b_ = params_.at("head.rot.b");
}

BevFeature TrackerModel::encode(const PointCloud& cloud) const {
  return pillarize(cloud, config_.crop, pillar_);
}

BevFeature TrackerModel::encode(const PointCloud& cloud, const CropSpec& window) const {
  if (window.grid_h != config_.crop.grid_h || window.grid_w != config_.crop.grid_w) {
    throw ShapeError("encode: crop grid differs from the model grid");
  }
  return pillarize(cloud, window, pillar_);
}

Tensor TrackerModel::backbone_forward(const BevFeature& prev, const BevFeature& curr,
                                      BackboneTrace* trace) const {
  BevFeature p = prev, c = curr;
  for (std::size_t s = 0; s < blocks_.size(); ++s) {
    const BlockConfig& bc = blocks_[s].config;
    BlockOutput out = block_forward(p, c, blocks_[s]);
    const Shape grid{bc.grid_h, bc.grid_w, bc.channels};
    const Conv2dOptions down{.stride = 2, .padding = 1};
    p = {conv2d(reshape(out.prev, grid), down_w_[s], down_b_[s], down), s + 1};
    c = {conv2d(reshape(out.curr, grid), down_w_[s], down_b_[s], down), s + 1};
    if (trace) trace->blocks.push_back(std::move(out));
  }
  return c.grid;
}

Tensor TrackerModel::head_forward(const Tensor& features) const {
  const ArchitecturePlan plan = plan_architecture(config_);
  const Shape expected{plan.backbone_out.h, plan.backbone_out.w, plan.backbone_out.c};
  if (features.shape() != expected) {
    throw ShapeError("head_forward: features " + shape_string(features.shape()) +
                     " but the head expects " + shape_string(expected));
  }
  Tensor x = features;
  for (std::size_t i = 0; i < head_w_.size(); ++i) {
    const Conv2dOptions opt{.stride = 2, .padding = head_block_padding(x.dim(0))};
    x = silu(conv2d(x, head_w_[i], head_b_[i], opt));
  }
  const Tensor flat = reshape(x, {1, x.numel()});
  const Tensor trunk = silu(linear(flat, mlp_w_, mlp_b_));
  const Tensor parts[] = {linear(trunk, xy_w_, xy_b_), linear(trunk, z_w_, z_b_),
                          wrap_angle(linear(trunk, rot_w_, rot_b_))};
  return concat(parts);
}

Tensor TrackerModel::forward(const PointCloud& prev, const PointCloud& curr) const {
  return head_forward(backbone_forward(encode(prev), encode(curr)));
}

std::vector<double> TrackerModel::alphas() const {
  std::vector<double> out;
  for (const auto& b : blocks_) {
    if (b.alpha.defined()) out.push_back(b.alpha.item());
  }
  return out;
}

}  // namespace mdtrack
