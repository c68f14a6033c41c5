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

#ifndef MDTRACK_PILLAR_H_
#define MDTRACK_PILLAR_H_

#include <array>
#include <cstddef>
#include <string>

#include "mdtrack/param_store.h"
#include "mdtrack/point_cloud.h"
#include "mdtrack/tensor.h"

namespace mdtrack {

// Crop window in the canonical frame and the BEV grid laid over it.
// Columns index x, rows index y; each axis uses [min, max).
struct CropSpec {
  std::array<double, 2> x_range{-4.8, 4.8};
  std::array<double, 2> y_range{-4.8, 4.8};
  std::array<double, 2> z_range{-1.5, 1.5};
  std::size_t grid_h = 128;
  std::size_t grid_w = 128;

  static CropSpec car(std::size_t grid = 128);
  static CropSpec pedestrian(std::size_t grid = 128);
  // Window with the box's aspect ratio, `ratio` times its footprint.
  static CropSpec around_box(const Box3D& box, double ratio, std::size_t grid);

  // Throws ConfigError when ranges are degenerate or the grid is not a power
  // of two >= 8.
  void validate() const;
  double cell_x() const { return (x_range[1] - x_range[0]) / static_cast<double>(grid_w); }
  double cell_y() const { return (y_range[1] - y_range[0]) / static_cast<double>(grid_h); }
  bool contains(const Point3& p) const;
};

PointCloud crop(const PointCloud& cloud, const CropSpec& window);

inline constexpr std::size_t kPointFeatures = 8;

// Dense BEV grid [H x W x C] produced by pillarization or a backbone stage.
struct BevFeature {
  Tensor grid;
  std::size_t stage = 0;

  std::size_t height() const { return grid.dim(0); }
  std::size_t width() const { return grid.dim(1); }
  std::size_t channels() const { return grid.dim(2); }
};

// Per-point linear layer of the pillar encoder: weight [8 x C], bias [C].
struct PillarParams {
  Tensor weight;
  Tensor bias;

  static PillarParams create(ParamStore& store, const std::string& prefix,
                             std::size_t channels, Rng& rng);
  static PillarParams bind(const ParamStore& store, const std::string& prefix);
};

// Cell id (row * W + col) of each point; the cloud must already be cropped.
std::vector<std::size_t> pillar_cells(const PointCloud& cloud, const CropSpec& window);

// Eight features per point: x, y, z, offsets to the pillar's x/y center and
// offsets to the mean x/y/z of the points sharing the pillar. Returns [P x 8].
Tensor decorate_points(const PointCloud& cloud, const CropSpec& window,
                       std::span<const std::size_t> cells);

// Decorate, project to C channels with SiLU, then max-pool into H x W x C.
BevFeature pillarize(const PointCloud& cloud, const CropSpec& window,
                     const PillarParams& params);

}  // namespace mdtrack

#endif  // MDTRACK_PILLAR_H_
