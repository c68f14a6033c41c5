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

#ifndef MDTRACK_OPS_H_
#define MDTRACK_OPS_H_

#include <cstddef>
#include <span>

#include "mdtrack/tensor.h"

namespace mdtrack {

// Elementwise; operands must have identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& x, double factor);
// x * s where s is a single-element tensor (e.g. a learnable scalar).
Tensor scale_by(const Tensor& x, const Tensor& s);
// Broadcasts bias[C] over every row of x[..., C].
Tensor add_bias(const Tensor& x, const Tensor& bias);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
// x[M x K] * w[K x N] (+ b[N] when defined).
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor silu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor softmax_rows(const Tensor& x);

inline constexpr double kLayerNormEps = 1e-5;
// Normalizes over the last axis, then applies gamma[C], beta[C].
Tensor layernorm(const Tensor& x, const Tensor& gamma, const Tensor& beta);

struct Conv2dOptions {
  int stride = 1;
  int padding = 1;
  bool depthwise = false;
};

// 3x3 convolution over x[H x W x Cin] (HWC layout).
// Dense weights are [3 x 3 x Cin x Cout]; depthwise weights are [3 x 3 x C].
// Output is [Ho x Wo x Cout] with Ho = (H + 2p - 3) / stride + 1.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
              Conv2dOptions options = {});
std::size_t conv_output_size(std::size_t in, int stride, int padding);

// Per-cell elementwise max of points[P x C] into [cells x C]. Empty cells are
// zero. Gradient goes to the single argmax point, lowest index on ties.
Tensor scatter_max(const Tensor& points, std::span<const std::size_t> cell_index,
                   std::size_t grid_cells);

Tensor reshape(const Tensor& x, Shape shape);
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end);
Tensor concat_cols(std::span<const Tensor> parts);
// Flat slice/concat over the row-major storage; results are 1-D.
Tensor slice(const Tensor& x, std::size_t begin, std::size_t end);
Tensor concat(std::span<const Tensor> parts);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor huber(const Tensor& x, double delta);
// Wraps each value into (-pi, pi]; the gradient passes through unchanged.
Tensor wrap_angle(const Tensor& x);

}  // namespace mdtrack

#endif  // MDTRACK_OPS_H_
