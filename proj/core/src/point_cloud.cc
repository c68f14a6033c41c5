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

#include "mdtrack/point_cloud.h"

#include <cmath>

namespace mdtrack {

PointCloud canonicalize(const PointCloud& cloud, const Box3D& ref) {
  const double c = std::cos(ref.theta), s = std::sin(ref.theta);
  PointCloud out;
  out.intensity = cloud.intensity;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    const double dx = p.x - ref.x, dy = p.y - ref.y;
    out.points.push_back({c * dx + s * dy, -s * dx + c * dy, p.z - ref.z});
  }
  return out;
}

PointCloud decanonicalize(const PointCloud& cloud, const Box3D& ref) {
  const double c = std::cos(ref.theta), s = std::sin(ref.theta);
  PointCloud out;
  out.intensity = cloud.intensity;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    out.points.push_back(
        {ref.x + c * p.x - s * p.y, ref.y + s * p.x + c * p.y, ref.z + p.z});
  }
  return out;
}

PointCloud rotate_cloud(const PointCloud& cloud, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  PointCloud out;
  out.intensity = cloud.intensity;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    out.points.push_back({c * p.x - s * p.y, s * p.x + c * p.y, p.z});
  }
  return out;
}

}  // namespace mdtrack
