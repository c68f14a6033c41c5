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

#include "mdtrack/pillar.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "mdtrack/errors.h"
#include "mdtrack/ops.h"

namespace mdtrack {

CropSpec CropSpec::car(std::size_t grid) {
  return {{-4.8, 4.8}, {-4.8, 4.8}, {-1.5, 1.5}, grid, grid};
}

CropSpec CropSpec::pedestrian(std::size_t grid) {
  return {{-1.92, 1.92}, {-1.92, 1.92}, {-1.5, 1.5}, grid, grid};
}

CropSpec CropSpec::around_box(const Box3D& box, double ratio, std::size_t grid) {
  const double hx = 0.5 * ratio * box.l, hy = 0.5 * ratio * box.w;
  return {{-hx, hx}, {-hy, hy}, {-1.5, 1.5}, grid, grid};
}

void CropSpec::validate() const {
  auto check_range = [](const std::array<double, 2>& r, const char* axis) {
    if (!(std::isfinite(r[0]) && std::isfinite(r[1]) && r[1] > r[0])) {
      throw ConfigError(std::string("crop ") + axis + " range must satisfy min < max");
    }
  };
  check_range(x_range, "x");
  check_range(y_range, "y");
  check_range(z_range, "z");
  for (std::size_t g : {grid_h, grid_w}) {
    if (g < 8 || !std::has_single_bit(g)) {
      throw ConfigError("crop grid size " + std::to_string(g) +
                        " must be a power of two >= 8");
    }
  }
}

bool CropSpec::contains(const Point3& p) const {
  return p.x >= x_range[0] && p.x < x_range[1] && p.y >= y_range[0] &&
         p.y < y_range[1] && p.z >= z_range[0] && p.z < z_range[1];
}

PointCloud crop(const PointCloud& cloud, const CropSpec& window) {
  PointCloud out;
  const bool has_intensity = cloud.intensity.size() == cloud.size();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!window.contains(cloud.points[i])) continue;
    out.points.push_back(cloud.points[i]);
    if (has_intensity) out.intensity.push_back(cloud.intensity[i]);
  }
  return out;
}

PillarParams PillarParams::create(ParamStore& store, const std::string& prefix,
                                  std::size_t channels, Rng& rng) {
  store.add_fan_in(prefix + ".w", {kPointFeatures, channels}, kPointFeatures, rng);
  store.add_zeros(prefix + ".b", {channels});
  return bind(store, prefix);
}

PillarParams PillarParams::bind(const ParamStore& store, const std::string& prefix) {
  return {store.at(prefix + ".w"), store.at(prefix + ".b")};
}

std::vector<std::size_t> pillar_cells(const PointCloud& cloud, const CropSpec& window) {
  const double cx = window.cell_x(), cy = window.cell_y();
  std::vector<std::size_t> cells;
  cells.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    if (!window.contains(p)) {
      throw std::out_of_range("pillar_cells: point outside the crop window");
    }
    auto col = static_cast<std::size_t>((p.x - window.x_range[0]) / cx);
    auto row = static_cast<std::size_t>((p.y - window.y_range[0]) / cy);
    col = std::min(col, window.grid_w - 1);
    row = std::min(row, window.grid_h - 1);
    cells.push_back(row * window.grid_w + col);
  }
  return cells;
}

Tensor decorate_points(const PointCloud& cloud, const CropSpec& window,
                       std::span<const std::size_t> cells) {
  const std::size_t n = cloud.size();
  // Sum each pillar's points in a canonical (sorted) order so the means do
  // not depend on input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Point3& pa = cloud.points[a];
    const Point3& pb = cloud.points[b];
    if (cells[a] != cells[b]) return cells[a] < cells[b];
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return pa.z < pb.z;
  });
  std::vector<std::array<double, 3>> means(n);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    std::array<double, 3> acc{0, 0, 0};
    while (end < n && cells[order[end]] == cells[order[start]]) {
      const Point3& p = cloud.points[order[end]];
      acc[0] += p.x;
      acc[1] += p.y;
      acc[2] += p.z;
      ++end;
    }
    const double cnt = static_cast<double>(end - start);
    for (std::size_t k = start; k < end; ++k) {
      means[order[k]] = {acc[0] / cnt, acc[1] / cnt, acc[2] / cnt};
    }
    start = end;
  }

  std::vector<double> feats(n * kPointFeatures);
  const double cx = window.cell_x(), cy = window.cell_y();
  for (std::size_t i = 0; i < n; ++i) {
    const Point3& p = cloud.points[i];
    const std::size_t col = cells[i] % window.grid_w, row = cells[i] / window.grid_w;
    const double center_x = window.x_range[0] + (static_cast<double>(col) + 0.5) * cx;
    const double center_y = window.y_range[0] + (static_cast<double>(row) + 0.5) * cy;
    double* f = feats.data() + i * kPointFeatures;
    f[0] = p.x;
    f[1] = p.y;
    f[2] = p.z;
    f[3] = p.x - center_x;
    f[4] = p.y - center_y;
    f[5] = p.x - means[i][0];
    f[6] = p.y - means[i][1];
    f[7] = p.z - means[i][2];
  }
  return Tensor::from_data({n, kPointFeatures}, std::move(feats));
}

BevFeature pillarize(const PointCloud& cloud, const CropSpec& window,
                     const PillarParams& params) {
  const std::size_t channels = params.weight.dim(1);
  const auto cells = pillar_cells(cloud, window);
  Tensor decorated = decorate_points(cloud, window, cells);
  Tensor per_point = silu(linear(decorated, params.weight, params.bias));
  Tensor pooled = scatter_max(per_point, cells, window.grid_h * window.grid_w);
  return {reshape(pooled, {window.grid_h, window.grid_w, channels}), 0};
}

}  // namespace mdtrack
