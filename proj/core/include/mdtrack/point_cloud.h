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

#ifndef MDTRACK_POINT_CLOUD_H_
#define MDTRACK_POINT_CLOUD_H_

#include <vector>

#include "mdtrack/geometry.h"

namespace mdtrack {

struct Point3 {
  double x = 0, y = 0, z = 0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

// Unordered set of sensor returns. Intensity is optional and, when present,
// has one entry per point.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<double> intensity;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

// Express the cloud in the frame of `ref`: translate by -center, then rotate
// by -yaw about the up axis.
PointCloud canonicalize(const PointCloud& cloud, const Box3D& ref);
// Inverse of canonicalize.
PointCloud decanonicalize(const PointCloud& cloud, const Box3D& ref);

// Rotates every point about the up axis through the origin.
PointCloud rotate_cloud(const PointCloud& cloud, double yaw);

}  // namespace mdtrack

#endif  // MDTRACK_POINT_CLOUD_H_
