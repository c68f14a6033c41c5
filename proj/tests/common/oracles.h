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

// Independent reference computations shared by the unit and acceptance tests.

#ifndef MDTRACK_TESTS_COMMON_ORACLES_H_
#define MDTRACK_TESTS_COMMON_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "mdtrack/geometry.h"

namespace mdtrack::oracle {

inline bool inside(const Box3D& b, double x, double y, double z) {
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  const double dx = x - b.x, dy = y - b.y;
  return std::abs(c * dx + s * dy) <= 0.5 * b.l && std::abs(-s * dx + c * dy) <= 0.5 * b.w &&
         std::abs(z - b.z) <= 0.5 * b.h;
}

// Volume IoU by uniform sampling of the joint bounding cube.
inline double monte_carlo_iou(const Box3D& a, const Box3D& b, std::size_t samples,
                              std::uint64_t seed) {
  auto reach = [](const Box3D& q) { return 0.5 * std::hypot(q.l, q.w); };
  const double x0 = std::min(a.x - reach(a), b.x - reach(b));
  const double x1 = std::max(a.x + reach(a), b.x + reach(b));
  const double y0 = std::min(a.y - reach(a), b.y - reach(b));
  const double y1 = std::max(a.y + reach(a), b.y + reach(b));
  const double z0 = std::min(a.z - 0.5 * a.h, b.z - 0.5 * b.h);
  const double z1 = std::max(a.z + 0.5 * a.h, b.z + 0.5 * b.h);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1), uz(z0, z1);
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = ux(rng), y = uy(rng), z = uz(rng);
    const bool ia = inside(a, x, y, z), ib = inside(b, x, y, z);
    both += ia && ib;
    either += ia || ib;
  }
  return either ? static_cast<double>(both) / static_cast<double>(either) : 0.0;
}

// Brute-force threshold sweep over the 201-point grid. Interior thresholds
// average the strict and non-strict counts; the first and last points use
// the strict/inclusive side that keeps perfect and empty results at 1 and 0.
inline double sweep_success(const std::vector<double>& ious) {
  const std::size_t grid = 201;
  const double n = static_cast<double>(ious.size());
  double area = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double tau = static_cast<double>(k) / 200.0;
    double gt = 0, ge = 0;
    for (double v : ious) {
      gt += v > tau;
      ge += v >= tau;
    }
    const double f = (k == 0 ? gt : k == grid - 1 ? ge : 0.5 * (gt + ge)) / n;
    if (k > 0) area += 0.5 * (prev + f) / 200.0;
    prev = f;
  }
  return area;
}

inline double sweep_precision(const std::vector<double>& distances) {
  const std::size_t grid = 201;
  const double n = static_cast<double>(distances.size());
  double area = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double delta = 2.0 * static_cast<double>(k) / 200.0;
    double lt = 0, le = 0;
    for (double v : distances) {
      lt += v < delta;
      le += v <= delta;
    }
    const double f = (k == 0 ? le : k == grid - 1 ? lt : 0.5 * (lt + le)) / n;
    if (k > 0) area += 0.5 * (prev + f) / 200.0;
    prev = f;
  }
  return area;
}

}  // namespace mdtrack::oracle

#endif  // MDTRACK_TESTS_COMMON_ORACLES_H_
