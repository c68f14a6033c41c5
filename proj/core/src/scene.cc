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

#include "mdtrack/scene.h"

#include <cmath>
#include <string>

#include "mdtrack/errors.h"

namespace mdtrack {
namespace {

// Kept out of line: GCC 11 at -O3 drops the narrowing when SLP-vectorized.
[[gnu::noinline]] double to_float32(double v) {
  return static_cast<double>(static_cast<float>(v));
}

void check_range(const std::array<double, 2>& r, const char* name, double lower) {
  if (!(std::isfinite(r[0]) && std::isfinite(r[1]) && r[0] <= r[1] && r[0] >= lower)) {
    throw ConfigError(std::string("scene ") + name + " range is invalid");
  }
}

void check_nonnegative(double v, const char* name) {
  if (!(std::isfinite(v) && v >= 0.0)) {
    throw ConfigError(std::string("scene ") + name + " must be finite and >= 0");
  }
}

struct Face {
  // Face center and two spanning half-extents in box-local coordinates.
  std::array<double, 3> center, u, v, normal;
};

std::array<Face, 5> box_faces(const Box3D& b) {
  const double hl = 0.5 * b.l, hw = 0.5 * b.w, hh = 0.5 * b.h;
  return {{
      {{hl, 0, 0}, {0, hw, 0}, {0, 0, hh}, {1, 0, 0}},
      {{-hl, 0, 0}, {0, hw, 0}, {0, 0, hh}, {-1, 0, 0}},
      {{0, hw, 0}, {hl, 0, 0}, {0, 0, hh}, {0, 1, 0}},
      {{0, -hw, 0}, {hl, 0, 0}, {0, 0, hh}, {0, -1, 0}},
      {{0, 0, hh}, {hl, 0, 0}, {0, hw, 0}, {0, 0, 1}},
  }};
}

Point3 local_to_world(const Box3D& b, double lx, double ly, double lz) {
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  return {b.x + c * lx - s * ly, b.y + s * lx + c * ly, b.z + lz};
}

double norm3(const std::array<double, 3>& a) {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

std::size_t draw_count(double expected, Rng& rng) {
  const double whole = std::floor(expected);
  return static_cast<std::size_t>(whole) + (rng.bernoulli(expected - whole) ? 1 : 0);
}

void sample_target(const Box3D& b, const SceneConfig& cfg, Rng& rng, PointCloud& out) {
  const double range = std::max(1.0, std::hypot(b.x, b.y, b.z));
  const double falloff = (cfg.reference_range / range) * (cfg.reference_range / range);
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  for (const Face& f : box_faces(b)) {
    const std::array<double, 3> n{c * f.normal[0] - s * f.normal[1],
                                  s * f.normal[0] + c * f.normal[1], f.normal[2]};
    const Point3 fc = local_to_world(b, f.center[0], f.center[1], f.center[2]);
    // Visible when the outward normal faces the sensor at the origin.
    if (n[0] * fc.x + n[1] * fc.y + n[2] * fc.z >= 0.0) continue;
    const double area = 4.0 * norm3(f.u) * norm3(f.v);
    const std::size_t count = draw_count(cfg.face_density * area * falloff, rng);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = rng.uniform(-1.0, 1.0), bb = rng.uniform(-1.0, 1.0);
      Point3 p = local_to_world(b, f.center[0] + a * f.u[0] + bb * f.v[0],
                                f.center[1] + a * f.u[1] + bb * f.v[1],
                                f.center[2] + a * f.u[2] + bb * f.v[2]);
      p.x += rng.uniform(-cfg.noise, cfg.noise);
      p.y += rng.uniform(-cfg.noise, cfg.noise);
      p.z += rng.uniform(-cfg.noise, cfg.noise);
      if (rng.bernoulli(cfg.dropout)) continue;
      out.points.push_back({to_float32(p.x), to_float32(p.y), to_float32(p.z)});
    }
  }
}

bool near_footprint(const Point3& p, const Box3D& b, double margin) {
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  const double dx = p.x - b.x, dy = p.y - b.y;
  const double lx = c * dx + s * dy, ly = -s * dx + c * dy;
  return std::abs(lx) <= 0.5 * b.l + margin && std::abs(ly) <= 0.5 * b.w + margin;
}

}  // namespace

void SceneConfig::validate() const {
  check_range(length, "length", 1e-3);
  check_range(width, "width", 1e-3);
  check_range(height, "height", 1e-3);
  check_range(speed, "speed", 0.0);
  check_range(start_range, "start_range", 0.0);
  check_nonnegative(yaw_rate, "yaw_rate");
  check_nonnegative(face_density, "face_density");
  check_nonnegative(clutter_density, "clutter_density");
  check_nonnegative(clutter_extent, "clutter_extent");
  check_nonnegative(clutter_height, "clutter_height");
  check_nonnegative(clutter_margin, "clutter_margin");
  check_nonnegative(noise, "noise");
  if (!(reference_range > 0.0)) throw ConfigError("scene reference_range must be positive");
  if (!(dropout >= 0.0 && dropout <= 1.0)) throw ConfigError("scene dropout must lie in [0, 1]");
  if (!(static_probability >= 0.0 && static_probability <= 1.0)) {
    throw ConfigError("scene static_probability must lie in [0, 1]");
  }
  if (segment[0] == 0 || segment[0] > segment[1]) {
    throw ConfigError("scene segment range must satisfy 1 <= min <= max");
  }
  if (frames < 2) throw ConfigError("scene frames must be at least 2");
}

std::vector<Motion4> LabeledSequence::motions() const {
  std::vector<Motion4> out;
  for (std::size_t t = 1; t < gt.size(); ++t) out.push_back(relative_motion(gt[t - 1], gt[t]));
  return out;
}

LabeledSequence generate(const SceneConfig& config) {
  config.validate();
  Rng rng(config.seed);
  Box3D box;
  box.l = rng.uniform(config.length[0], config.length[1]);
  box.w = rng.uniform(config.width[0], config.width[1]);
  box.h = rng.uniform(config.height[0], config.height[1]);
  const double range = rng.uniform(config.start_range[0], config.start_range[1]);
  const double bearing = rng.uniform(-kPi, kPi);
  box.x = range * std::cos(bearing);
  box.y = range * std::sin(bearing);
  box.z = config.ground_z + 0.5 * box.h;
  box.theta = wrap_angle(rng.uniform(-kPi, kPi));
  const bool is_static = rng.bernoulli(config.static_probability);

  LabeledSequence seq;
  double speed = 0.0, yaw_rate = 0.0;
  std::size_t segment_left = 0;
  for (std::size_t t = 0; t < config.frames; ++t) {
    if (t > 0) {
      if (segment_left == 0) {
        segment_left = config.segment[0] + rng.index(config.segment[1] - config.segment[0] + 1);
        speed = is_static ? 0.0 : rng.uniform(config.speed[0], config.speed[1]);
        yaw_rate = is_static ? 0.0 : rng.uniform(-config.yaw_rate, config.yaw_rate);
      }
      --segment_left;
      box.theta = wrap_angle(box.theta + yaw_rate);
      box.x += speed * std::cos(box.theta);
      box.y += speed * std::sin(box.theta);
    }
    seq.gt.push_back(box);
  }

  PointCloud clutter;
  const double half = 0.5 * config.clutter_extent;
  const Box3D& start = seq.gt.front();
  const std::size_t n_clutter =
      draw_count(config.clutter_density * config.clutter_extent * config.clutter_extent, rng);
  for (std::size_t i = 0; i < n_clutter; ++i) {
    Point3 p{start.x + rng.uniform(-half, half), start.y + rng.uniform(-half, half),
             config.ground_z + rng.uniform(0.0, config.clutter_height)};
    bool blocked = false;
    for (const Box3D& b : seq.gt) blocked = blocked || near_footprint(p, b, config.clutter_margin);
    if (!blocked) clutter.points.push_back({to_float32(p.x), to_float32(p.y), to_float32(p.z)});
  }

  for (const Box3D& b : seq.gt) {
    PointCloud frame;
    sample_target(b, config, rng, frame);
    seq.target_points.push_back(frame.size());
    frame.points.insert(frame.points.end(), clutter.points.begin(), clutter.points.end());
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

std::vector<LabeledSequence> generate_set(const SceneConfig& config, std::size_t count) {
  Rng seeds(config.seed);
  std::vector<LabeledSequence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SceneConfig c = config;
    c.seed = seeds.next();
    out.push_back(generate(c));
  }
  return out;
}

std::vector<FramePair> make_pairs(const std::vector<LabeledSequence>& sequences) {
  std::vector<FramePair> out;
  for (const auto& seq : sequences) {
    for (std::size_t t = 1; t < seq.size(); ++t) {
      out.push_back({&seq.frames[t - 1], &seq.frames[t], seq.gt[t - 1], seq.gt[t]});
    }
  }
  return out;
}

Motion4 pose_in_crop_frame(const Box3D& box) { return {box.x, box.y, box.z, box.theta}; }

namespace {

Box3D to_frame(const Box3D& box, const Box3D& ref) {
  const Motion4 m = relative_motion(ref, box);
  Box3D out = box;
  out.x = m.dx;
  out.y = m.dy;
  out.z = m.dz;
  out.theta = m.dtheta;
  return out;
}

TrainingSample canonical_sample(const FramePair& pair, const Box3D& reference) {
  TrainingSample s;
  s.prev = canonicalize(*pair.prev, reference);
  s.curr = canonicalize(*pair.curr, reference);
  s.prev_box = to_frame(pair.prev_box, reference);
  s.curr_box = to_frame(pair.curr_box, reference);
  s.target = pose_in_crop_frame(s.curr_box);
  return s;
}

TrainingSample crop_sample(TrainingSample s, const CropSpec& window) {
  s.prev = crop(s.prev, window);
  s.curr = crop(s.curr, window);
  return s;
}

PointCloud mirror(const PointCloud& cloud) {
  PointCloud out = cloud;
  for (auto& p : out.points) p.y = -p.y;
  return out;
}

Box3D mirror(const Box3D& b) {
  Box3D out = b;
  out.y = -b.y;
  out.theta = wrap_angle(-b.theta);
  return out;
}

}  // namespace

TrainingSample make_sample(const FramePair& pair, const Box3D& reference,
                           const CropSpec& window) {
  return crop_sample(canonical_sample(pair, reference), window);
}

TrainingSample flip_sample(const TrainingSample& sample) {
  TrainingSample s;
  s.prev = mirror(sample.prev);
  s.curr = mirror(sample.curr);
  s.prev_box = mirror(sample.prev_box);
  s.curr_box = mirror(sample.curr_box);
  s.target = pose_in_crop_frame(s.curr_box);
  return s;
}

TrainingSample rotate_sample(const TrainingSample& sample, double yaw) {
  TrainingSample s;
  s.prev = rotate_cloud(sample.prev, yaw);
  s.curr = rotate_cloud(sample.curr, yaw);
  s.prev_box = rotate_box_about_origin(sample.prev_box, yaw);
  s.curr_box = rotate_box_about_origin(sample.curr_box, yaw);
  s.target = pose_in_crop_frame(s.curr_box);
  return s;
}

TrainingSample augment(const FramePair& pair, const AugmentOptions& options,
                       const CropSpec& window, Rng& rng) {
  Box3D reference = pair.prev_box;
  const double jx = rng.uniform(-1.0, 1.0) * options.reference_jitter;
  const double jy = rng.uniform(-1.0, 1.0) * options.reference_jitter;
  reference.x += jx;
  reference.y += jy;
  const bool flip = rng.bernoulli(options.flip_probability);
  const double max_yaw = options.max_rotation_deg * kPi / 180.0;
  const double yaw = rng.uniform(-max_yaw, max_yaw);

  TrainingSample s = canonical_sample(pair, reference);
  if (flip) s = flip_sample(s);
  if (yaw != 0.0) s = rotate_sample(s, yaw);
  return crop_sample(std::move(s), window);
}

}  // namespace mdtrack
