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

#include <gtest/gtest.h>

#include <cmath>

#include "mdtrack/errors.h"
#include "mdtrack/geometry.h"
#include "mdtrack/point_cloud.h"
#include "mdtrack/scene.h"

namespace mdtrack {
namespace {

SceneConfig small_scene(std::uint64_t seed) {
  SceneConfig c;
  c.frames = 8;
  c.seed = seed;
  return c;
}

// Point in the frame of `b` with the box heading along +x.
Point3 local(const Point3& p, const Box3D& b) {
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  const double dx = p.x - b.x, dy = p.y - b.y;
  return {c * dx + s * dy, -s * dx + c * dy, p.z - b.z};
}

TEST(Scene, FixedSeedIsBitIdentical) {
  const LabeledSequence a = generate(small_scene(3));
  const LabeledSequence b = generate(small_scene(3));
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.gt, b.gt);
  const LabeledSequence c = generate(small_scene(4));
  EXPECT_NE(a.gt, c.gt);
}

TEST(Scene, ZeroVelocityKeepsTheBoxFixed) {
  SceneConfig cfg = small_scene(5);
  cfg.speed = {0.0, 0.0};
  cfg.yaw_rate = 0.0;
  const LabeledSequence seq = generate(cfg);
  for (const Box3D& b : seq.gt) EXPECT_EQ(b, seq.gt.front());
}

TEST(Scene, StaticProbabilityOneFreezesTarget) {
  SceneConfig cfg = small_scene(6);
  cfg.static_probability = 1.0;
  const LabeledSequence seq = generate(cfg);
  for (const Box3D& b : seq.gt) EXPECT_EQ(b, seq.gt.front());
}

TEST(Scene, DerivedMotionReproducesNextBox) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LabeledSequence seq = generate(small_scene(seed));
    const auto motions = seq.motions();
    ASSERT_EQ(motions.size(), seq.size() - 1);
    for (std::size_t t = 1; t < seq.size(); ++t) {
      const Box3D next = compose_pose(seq.gt[t - 1], motions[t - 1]);
      EXPECT_NEAR(next.x, seq.gt[t].x, 1e-12);
      EXPECT_NEAR(next.y, seq.gt[t].y, 1e-12);
      EXPECT_NEAR(next.z, seq.gt[t].z, 1e-12);
      EXPECT_NEAR(wrap_angle(next.theta - seq.gt[t].theta), 0.0, 1e-12);
    }
  }
}

TEST(Scene, SizesConstantAndInsideConfiguredRanges) {
  const SceneConfig cfg = small_scene(7);
  for (const LabeledSequence& seq : generate_set(cfg, 10)) {
    const Box3D& b0 = seq.gt.front();
    EXPECT_GE(b0.l, cfg.length[0]);
    EXPECT_LE(b0.l, cfg.length[1]);
    EXPECT_GE(b0.w, cfg.width[0]);
    EXPECT_LE(b0.w, cfg.width[1]);
    EXPECT_GE(b0.h, cfg.height[0]);
    EXPECT_LE(b0.h, cfg.height[1]);
    for (const Box3D& b : seq.gt) {
      EXPECT_TRUE(b.valid());
      EXPECT_EQ(b.w, b0.w);
      EXPECT_EQ(b.h, b0.h);
      EXPECT_EQ(b.l, b0.l);
    }
  }
}

TEST(Scene, TargetPointsLieInsideInflatedBox) {
  const SceneConfig cfg = small_scene(8);
  // World-axis noise seen from the box frame, plus float32 rounding.
  const double rounding = 1e-5;
  for (const LabeledSequence& seq : generate_set(cfg, 5)) {
    for (std::size_t t = 0; t < seq.size(); ++t) {
      const Box3D& b = seq.gt[t];
      const double slack =
          cfg.noise * (std::abs(std::cos(b.theta)) + std::abs(std::sin(b.theta))) + rounding;
      ASSERT_LE(seq.target_points[t], seq.frames[t].size());
      EXPECT_GT(seq.target_points[t], 0u);
      for (std::size_t i = 0; i < seq.target_points[t]; ++i) {
        const Point3 q = local(seq.frames[t].points[i], b);
        EXPECT_LE(std::abs(q.x), 0.5 * b.l + slack);
        EXPECT_LE(std::abs(q.y), 0.5 * b.w + slack);
        EXPECT_LE(std::abs(q.z), 0.5 * b.h + cfg.noise + rounding);
      }
    }
  }
}

TEST(Scene, ClutterIsStaticAndClearOfTheTargetPath) {
  const SceneConfig cfg = small_scene(9);
  const LabeledSequence seq = generate(cfg);
  const std::size_t n0 = seq.frames[0].size() - seq.target_points[0];
  EXPECT_GT(n0, 0u);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto& pts = seq.frames[t].points;
    ASSERT_EQ(pts.size() - seq.target_points[t], n0);
    for (std::size_t i = 0; i < n0; ++i) {
      const Point3& p = pts[seq.target_points[t] + i];
      EXPECT_EQ(p, seq.frames[0].points[seq.target_points[0] + i]);
      if (t == 0) {
        for (const Box3D& b : seq.gt) {
          const Point3 q = local(p, b);
          EXPECT_FALSE(std::abs(q.x) < 0.5 * b.l + cfg.clutter_margin - 1e-5 &&
                       std::abs(q.y) < 0.5 * b.w + cfg.clutter_margin - 1e-5);
        }
      }
    }
  }
}

TEST(Scene, CoordinatesAreFloat32Exact) {
  const LabeledSequence seq = generate(small_scene(10));
  for (const PointCloud& f : seq.frames) {
    for (const Point3& p : f.points) {
      EXPECT_EQ(static_cast<double>(static_cast<float>(p.x)), p.x);
      EXPECT_EQ(static_cast<double>(static_cast<float>(p.y)), p.y);
      EXPECT_EQ(static_cast<double>(static_cast<float>(p.z)), p.z);
    }
  }
}

TEST(Scene, ValidateRejectsBadConfigs) {
  SceneConfig c;
  c.frames = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.face_density = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.speed = {1.0, 0.5};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.dropout = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(SceneConfig{}.validate());
}

TEST(Pairs, OnePairPerConsecutiveFrame) {
  const auto set = generate_set(small_scene(11), 3);
  const auto pairs = make_pairs(set);
  ASSERT_EQ(pairs.size(), 3u * 7u);
  EXPECT_EQ(pairs[0].prev, &set[0].frames[0]);
  EXPECT_EQ(pairs[0].curr, &set[0].frames[1]);
  EXPECT_EQ(pairs[7].curr_box, set[1].gt[1]);
}

class Augmentation : public ::testing::Test {
 protected:
  void SetUp() override {
    seq_ = generate(small_scene(12));
    pair_ = {&seq_.frames[2], &seq_.frames[3], seq_.gt[2], seq_.gt[3]};
  }
  LabeledSequence seq_;
  FramePair pair_;
  CropSpec spec_ = CropSpec::car(32);
};

TEST_F(Augmentation, UnaugmentedTargetIsTheGroundTruthMotion) {
  const TrainingSample s = make_sample(pair_, pair_.prev_box, spec_);
  const Motion4 m = relative_motion(pair_.prev_box, pair_.curr_box);
  EXPECT_NEAR(s.target.dx, m.dx, 1e-12);
  EXPECT_NEAR(s.target.dy, m.dy, 1e-12);
  EXPECT_NEAR(s.target.dz, m.dz, 1e-12);
  EXPECT_NEAR(wrap_angle(s.target.dtheta - m.dtheta), 0.0, 1e-12);
  EXPECT_NEAR(s.prev_box.x, 0.0, 1e-12);
  EXPECT_NEAR(s.prev_box.theta, 0.0, 1e-12);
}

TEST_F(Augmentation, NoFlipNoRotationLeavesSampleUnchanged) {
  AugmentOptions o;
  o.flip_probability = 0.0;
  o.max_rotation_deg = 0.0;
  Rng rng(1);
  const TrainingSample a = augment(pair_, o, spec_, rng);
  const TrainingSample b = make_sample(pair_, pair_.prev_box, spec_);
  EXPECT_EQ(a.prev, b.prev);
  EXPECT_EQ(a.curr, b.curr);
  EXPECT_EQ(a.prev_box, b.prev_box);
  EXPECT_EQ(a.curr_box, b.curr_box);
  EXPECT_EQ(a.target, b.target);
}

TEST_F(Augmentation, FlipIsAnInvolution) {
  const TrainingSample s = make_sample(pair_, pair_.prev_box, spec_);
  const TrainingSample twice = flip_sample(flip_sample(s));
  EXPECT_EQ(twice.prev, s.prev);
  EXPECT_EQ(twice.curr, s.curr);
  EXPECT_EQ(twice.curr_box.y, s.curr_box.y);
  EXPECT_NEAR(wrap_angle(twice.curr_box.theta - s.curr_box.theta), 0.0, 1e-15);
  const TrainingSample once = flip_sample(s);
  EXPECT_EQ(once.target.dy, -s.target.dy);
  EXPECT_NEAR(once.target.dtheta, -s.target.dtheta, 1e-15);
}

TEST_F(Augmentation, RotationRoundTrips) {
  const TrainingSample s = make_sample(pair_, pair_.prev_box, spec_);
  const TrainingSample back = rotate_sample(rotate_sample(s, 0.07), -0.07);
  ASSERT_EQ(back.curr.size(), s.curr.size());
  for (std::size_t i = 0; i < s.curr.size(); ++i) {
    EXPECT_NEAR(back.curr.points[i].x, s.curr.points[i].x, 1e-12);
    EXPECT_NEAR(back.curr.points[i].y, s.curr.points[i].y, 1e-12);
  }
  EXPECT_NEAR(back.target.dx, s.target.dx, 1e-12);
  EXPECT_NEAR(back.target.dy, s.target.dy, 1e-12);
}

TEST_F(Augmentation, LabelMatchesRecomputedMotionOfAugmentedBoxes) {
  AugmentOptions o;
  o.reference_jitter = 0.3;
  Rng rng(2);
  const Box3D identity{0, 0, 0, pair_.prev_box.w, pair_.prev_box.h, pair_.prev_box.l, 0};
  for (int trial = 0; trial < 50; ++trial) {
    const TrainingSample s = augment(pair_, o, spec_, rng);
    // The crop frame is the identity pose; the label is the augmented box's
    // motion relative to it.
    const Motion4 oracle = relative_motion(identity, s.curr_box);
    EXPECT_EQ(s.target.dx, oracle.dx);
    EXPECT_EQ(s.target.dy, oracle.dy);
    EXPECT_EQ(s.target.dz, oracle.dz);
    EXPECT_EQ(s.target.dtheta, oracle.dtheta);
    // Augmented boxes keep their relative motion up to the mirror.
    const Motion4 rel = relative_motion(s.prev_box, s.curr_box);
    const Motion4 truth = relative_motion(pair_.prev_box, pair_.curr_box);
    EXPECT_NEAR(std::abs(rel.dy), std::abs(truth.dy), 1e-12);
    EXPECT_NEAR(rel.dx, truth.dx, 1e-12);
  }
}

TEST_F(Augmentation, RotationStaysWithinConfiguredRange) {
  AugmentOptions o;
  o.flip_probability = 0.0;
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const TrainingSample s = augment(pair_, o, spec_, rng);
    EXPECT_LE(std::abs(s.prev_box.theta), 5.0 * kPi / 180.0 + 1e-12);
  }
}

}  // namespace
}  // namespace mdtrack
