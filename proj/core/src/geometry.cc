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

#include "mdtrack/geometry.h"

#include <cmath>

namespace mdtrack {

double wrap_angle(double theta) {
  const double two_pi = 2.0 * kPi;
  double r = std::fmod(theta, two_pi);  // (-2pi, 2pi)
  if (r > kPi) r -= two_pi;
  if (r <= -kPi) r += two_pi;
  return r;
}

bool Box3D::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && w > 0 &&
         h > 0 && l > 0 && theta > -kPi && theta <= kPi;
}

std::array<std::array<double, 2>, 4> Box3D::bev_corners() const {
  const double c = std::cos(theta), s = std::sin(theta);
  const double hl = 0.5 * l, hw = 0.5 * w;
  const std::array<std::array<double, 2>, 4> local{
      {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}};
  std::array<std::array<double, 2>, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i] = {x + c * local[i][0] - s * local[i][1],
              y + s * local[i][0] + c * local[i][1]};
  }
  return out;
}

Box3D compose_pose(const Box3D& prev, const Motion4& motion) {
  const double c = std::cos(prev.theta), s = std::sin(prev.theta);
  Box3D out = prev;
  out.x = prev.x + c * motion.dx - s * motion.dy;
  out.y = prev.y + s * motion.dx + c * motion.dy;
  out.z = prev.z + motion.dz;
  out.theta = wrap_angle(prev.theta + motion.dtheta);
  return out;
}

Motion4 relative_motion(const Box3D& prev, const Box3D& curr) {
  const double c = std::cos(prev.theta), s = std::sin(prev.theta);
  const double ex = curr.x - prev.x, ey = curr.y - prev.y;
  return {c * ex + s * ey, -s * ex + c * ey, curr.z - prev.z,
          wrap_angle(curr.theta - prev.theta)};
}

Motion4 chain_motion(const Motion4& first, const Motion4& second) {
  const double c = std::cos(first.dtheta), s = std::sin(first.dtheta);
  return {first.dx + c * second.dx - s * second.dy,
          first.dy + s * second.dx + c * second.dy, first.dz + second.dz,
          wrap_angle(first.dtheta + second.dtheta)};
}

Box3D rotate_box_about_origin(const Box3D& box, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Box3D out = box;
  out.x = c * box.x - s * box.y;
  out.y = s * box.x + c * box.y;
  out.theta = wrap_angle(box.theta + yaw);
  return out;
}

}  // namespace mdtrack
