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

#ifndef MDTRACK_SCENE_H_
#define MDTRACK_SCENE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mdtrack/geometry.h"
#include "mdtrack/param_store.h"
#include "mdtrack/pillar.h"
#include "mdtrack/point_cloud.h"

namespace mdtrack {

// Procedural single-target scene seen by a sensor at the origin.
struct SceneConfig {
  std::array<double, 2> length{3.6, 4.8};  // meters, uniform
  std::array<double, 2> width{1.6, 2.0};
  std::array<double, 2> height{1.4, 1.8};
  std::array<double, 2> speed{0.2, 0.8};  // meters per frame
  double yaw_rate = 0.06;                 // max |rad per frame|
  std::array<std::size_t, 2> segment{4, 8};  // frames per constant-velocity segment
  double static_probability = 0.0;          // whole-sequence static target
  std::array<double, 2> start_range{8.0, 14.0};  // sensor to initial center
  double ground_z = -1.73;
  double face_density = 40.0;     // points per m^2 at the reference range
  double reference_range = 10.0;  // meters
  double noise = 0.02;            // half-width of uniform per-axis noise
  double clutter_density = 0.4;   // static points per m^2 of ground
  double clutter_extent = 24.0;   // side of the square around the start
  double clutter_height = 2.0;
  double clutter_margin = 0.3;  // clutter kept this far from every gt footprint
  double dropout = 0.1;         // per target point, per frame
  std::size_t frames = 12;
  std::uint64_t seed = 0;

  // Throws ConfigError on negative densities, empty ranges or frames < 2.
  void validate() const;
};

struct LabeledSequence {
  std::vector<PointCloud> frames;
  std::vector<Box3D> gt;
  // Number of leading points in each frame sampled from the target surface.
  // Generation metadata only; not persisted.
  std::vector<std::size_t> target_points;

  std::size_t size() const { return frames.size(); }
  // Motion of gt[t] relative to gt[t-1]; index t-1 holds the step into frame t.
  std::vector<Motion4> motions() const;
};

LabeledSequence generate(const SceneConfig& config);

// `count` sequences with seeds drawn from `config.seed`.
std::vector<LabeledSequence> generate_set(const SceneConfig& config, std::size_t count);

// Consecutive frames with their ground-truth boxes.
struct FramePair {
  const PointCloud* prev = nullptr;
  const PointCloud* curr = nullptr;
  Box3D prev_box;
  Box3D curr_box;
};

std::vector<FramePair> make_pairs(const std::vector<LabeledSequence>& sequences);

struct AugmentOptions {
  double flip_probability = 0.5;  // mirror y -> -y in the canonical frame
  double max_rotation_deg = 5.0;  // uniform yaw about the up axis
  double reference_jitter = 0.0;  // meters of uniform offset of the crop center
};

// One training example in the crop frame. `prev_box`/`curr_box` are the
// augmented ground-truth boxes and `target` is curr_box's pose relative to
// the crop frame.
struct TrainingSample {
  PointCloud prev;
  PointCloud curr;
  Box3D prev_box;
  Box3D curr_box;
  Motion4 target;
};

// Canonicalize both clouds around `reference` and crop; no augmentation.
TrainingSample make_sample(const FramePair& pair, const Box3D& reference,
                           const CropSpec& window);

// Mirror every point and box across the canonical x axis.
TrainingSample flip_sample(const TrainingSample& sample);
// Rotate every point and box about the canonical up axis.
TrainingSample rotate_sample(const TrainingSample& sample, double yaw);

// Canonicalize around the (optionally jittered) previous box, flip with the
// configured probability, rotate by a uniform yaw, then crop.
TrainingSample augment(const FramePair& pair, const AugmentOptions& options,
                       const CropSpec& window, Rng& rng);

// Motion4 carrying the crop frame's identity pose onto `box`.
Motion4 pose_in_crop_frame(const Box3D& box);

}  // namespace mdtrack

#endif  // MDTRACK_SCENE_H_
