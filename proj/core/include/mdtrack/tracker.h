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

#ifndef MDTRACK_TRACKER_H_
#define MDTRACK_TRACKER_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mdtrack/geometry.h"
#include "mdtrack/metrics.h"
#include "mdtrack/model.h"
#include "mdtrack/pillar.h"
#include "mdtrack/point_cloud.h"
#include "mdtrack/scene.h"

namespace mdtrack {

// Per-frame predictions; boxes[0] is the given initial box.
struct Tracklet {
  std::string sequence_id;
  std::vector<Box3D> boxes;
  // True where both crops were empty and the box coasted with zero motion.
  std::vector<bool> coasted;
};

// Predicts motion in the crop frame from the canonical clouds of frames t-1
// and t, both already cropped to `window`.
using MotionPredictor = std::function<Motion4(const PointCloud& prev, const PointCloud& curr,
                                              const CropSpec& window, std::size_t t)>;
using CropPolicy = std::function<CropSpec(const Box3D& reference)>;

Tracklet track_sequence(const std::vector<PointCloud>& frames, const Box3D& init_box,
                        const CropPolicy& crop_policy, const MotionPredictor& predict);

// Network inference, gradient recording disabled.
Tracklet track_sequence(const std::vector<PointCloud>& frames, const Box3D& init_box,
                        const TrackerModel& model);

// Forward pass on canonical clouds already cropped to `window`.
Motion4 predict_motion(const TrackerModel& model, const PointCloud& prev,
                       const PointCloud& curr, const CropSpec& window);

// `t x y z w h l theta` per line, t being the frame index.
// OPE pooled over sequences, each tracked from its first ground-truth box.
OpeResult evaluate_tracking(const TrackerModel& model,
                            const std::vector<LabeledSequence>& sequences);
// Zero-motion baseline: every frame repeats the initial box.
OpeResult evaluate_coasting(const std::vector<LabeledSequence>& sequences);

void write_tracklet_text(const Tracklet& tracklet, const std::filesystem::path& path);
void write_tracklet_jsonl(const Tracklet& tracklet, const std::filesystem::path& path);

}  // namespace mdtrack

#endif  // MDTRACK_TRACKER_H_
