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

#include "mdtrack/tracker.h"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mdtrack/sequence_io.h"
#include "mdtrack/tensor.h"

namespace mdtrack {

Tracklet track_sequence(const std::vector<PointCloud>& frames, const Box3D& init_box,
                        const CropPolicy& crop_policy, const MotionPredictor& predict) {
  if (frames.size() < 2) throw std::invalid_argument("track_sequence: need at least two frames");
  if (!init_box.valid()) throw std::invalid_argument("track_sequence: invalid initial box");
  Tracklet out;
  out.boxes.push_back(init_box);
  out.coasted.push_back(false);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    const Box3D& ref = out.boxes.back();
    const CropSpec window = crop_policy(ref);
    const PointCloud prev = crop(canonicalize(frames[t - 1], ref), window);
    const PointCloud curr = crop(canonicalize(frames[t], ref), window);
    const bool empty = prev.empty() && curr.empty();
    const Motion4 motion = empty ? Motion4{} : predict(prev, curr, window, t);
    Box3D next = compose_pose(ref, motion);
    next.w = init_box.w;
    next.h = init_box.h;
    next.l = init_box.l;
    out.boxes.push_back(next);
    out.coasted.push_back(empty);
  }
  return out;
}

Motion4 predict_motion(const TrackerModel& model, const PointCloud& prev,
                       const PointCloud& curr, const CropSpec& window) {
  NoGradGuard no_grad;
  return to_motion(model.head_forward(
      model.backbone_forward(model.encode(prev, window), model.encode(curr, window))));
}

Tracklet track_sequence(const std::vector<PointCloud>& frames, const Box3D& init_box,
                        const TrackerModel& model) {
  const ModelConfig& config = model.config();
  return track_sequence(
      frames, init_box, [&](const Box3D& ref) { return config.crop_for(ref); },
      [&](const PointCloud& prev, const PointCloud& curr, const CropSpec& window,
          std::size_t) { return predict_motion(model, prev, curr, window); });
}

void write_tracklet_text(const Tracklet& tracklet, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  char buf[256];
  for (std::size_t t = 0; t < tracklet.boxes.size(); ++t) {
    const Box3D& b = tracklet.boxes[t];
    std::snprintf(buf, sizeof(buf), "%zu %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", t, b.x,
                  b.y, b.z, b.w, b.h, b.l, b.theta);
    f << buf;
  }
}

void write_tracklet_jsonl(const Tracklet& tracklet, const std::filesystem::path& path) {
  write_boxes_jsonl(tracklet.boxes, path, &tracklet.coasted);
}

OpeResult evaluate_tracking(const TrackerModel& model,
                            const std::vector<LabeledSequence>& sequences) {
  std::vector<OpeResult> parts;
  for (const LabeledSequence& seq : sequences) {
    parts.push_back(ope(track_sequence(seq.frames, seq.gt.at(0), model).boxes, seq.gt));
  }
  return summarize_ope(parts);
}

OpeResult evaluate_coasting(const std::vector<LabeledSequence>& sequences) {
  std::vector<OpeResult> parts;
  for (const LabeledSequence& seq : sequences) {
    const std::vector<Box3D> coast(seq.size(), seq.gt.at(0));
    parts.push_back(ope(coast, seq.gt));
  }
  return summarize_ope(parts);
}

}  // namespace mdtrack
