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

#ifndef MDTRACK_METRICS_H_
#define MDTRACK_METRICS_H_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mdtrack/geometry.h"

namespace mdtrack {

using Polygon = std::vector<std::array<double, 2>>;

inline constexpr double kClipEpsilon = 1e-9;

// Clips `subject` against the convex counter-clockwise polygon `clip`.
Polygon clip_polygon(const Polygon& subject, const Polygon& clip);
double polygon_area(const Polygon& poly);

double bev_intersection_area(const Box3D& a, const Box3D& b);
// Rotated 3D IoU: BEV polygon intersection times vertical overlap, over the
// union. Throws std::invalid_argument for zero-volume boxes.
double iou3d(const Box3D& a, const Box3D& b);
double center_distance(const Box3D& a, const Box3D& b);

inline constexpr std::size_t kOpeGridPoints = 201;
inline constexpr double kPrecisionMaxDistance = 2.0;  // meters

struct OpeResult {
  std::vector<double> ious;
  std::vector<double> distances;
  double success_auc = 0.0;
  double precision_auc = 0.0;
};

// Success curve: fraction of frames whose IoU exceeds each threshold of the
// 201-point grid over [0, 1]. At a grid point that equals an observed value
// the strict and non-strict fractions are averaged; the end points use
// IoU > 0 and IoU >= 1.
std::vector<double> success_curve(std::span<const double> ious);
// Precision curve over [0, 2] m: fraction of frames with distance below the
// threshold, same tie convention (distance <= 0 at 0, < 2 at 2).
std::vector<double> precision_curve(std::span<const double> distances);
// Trapezoid area under a curve sampled on the uniform grid, normalized to
// the unit interval.
double curve_auc(std::span<const double> curve);

// Scores frames 1..T-1; frame 0 is the given box.
OpeResult ope(std::span<const Box3D> pred, std::span<const Box3D> gt);
// Pooled curves over all frames of several evaluated sequences.
OpeResult summarize_ope(std::span<const OpeResult> parts);

}  // namespace mdtrack

#endif  // MDTRACK_METRICS_H_
