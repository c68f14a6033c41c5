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

#ifndef MDTRACK_GEOMETRY_H_
#define MDTRACK_GEOMETRY_H_

#include <array>
#include <numbers>

namespace mdtrack {

inline constexpr double kPi = std::numbers::pi;

// Maps any finite angle into (-pi, pi].
double wrap_angle(double theta);

// Oriented box. `l` runs along the heading (local x), `w` along local y and
// `h` along the up axis. `theta` is the yaw of local x in the world frame.
struct Box3D {
  double x = 0, y = 0, z = 0;
  double w = 1, h = 1, l = 1;
  double theta = 0;

  bool valid() const;
  std::array<std::array<double, 2>, 4> bev_corners() const;
  double volume() const { return w * h * l; }

  friend bool operator==(const Box3D&, const Box3D&) = default;
};

// Relative motion expressed in the frame of the reference box.
struct Motion4 {
  double dx = 0, dy = 0, dz = 0, dtheta = 0;

  friend bool operator==(const Motion4&, const Motion4&) = default;
};

// Applies `motion` (given in prev's frame) to prev. Reduces to plain
// component-wise addition when prev.theta == 0.
Box3D compose_pose(const Box3D& prev, const Motion4& motion);

// Inverse of compose_pose: the motion that carries `prev` onto `curr`.
Motion4 relative_motion(const Box3D& prev, const Box3D& curr);

// Motion equivalent to applying `first` then `second`.
Motion4 chain_motion(const Motion4& first, const Motion4& second);

// Rotates a box about the world up axis through the origin.
Box3D rotate_box_about_origin(const Box3D& box, double yaw);

}  // namespace mdtrack

#endif  // MDTRACK_GEOMETRY_H_
