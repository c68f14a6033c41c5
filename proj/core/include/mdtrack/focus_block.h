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

#ifndef MDTRACK_FOCUS_BLOCK_H_
#define MDTRACK_FOCUS_BLOCK_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mdtrack/param_store.h"
#include "mdtrack/pillar.h"
#include "mdtrack/tensor.h"

namespace mdtrack {

// Module switches for the ablation settings. All on is the full block.
struct BlockToggles {
  bool imm = true;     // motion-difference gate
  bool dwc = true;     // depthwise conv in the pre-processing path
  bool linear = true;  // shared linear layer after the depthwise conv
  bool shared = true;  // one set of CNN/DWC/linear weights for both frames

  friend bool operator==(const BlockToggles&, const BlockToggles&) = default;
};

struct BlockConfig {
  std::size_t grid_h = 0;
  std::size_t grid_w = 0;
  std::size_t channels = 0;
  std::size_t heads = 1;
  std::size_t ffn_expansion = 2;
  double alpha_init = 0.5;
  BlockToggles toggles;

  std::size_t tokens() const { return grid_h * grid_w; }
  std::size_t head_dim() const { return channels / heads; }
  void validate() const;
};

// Handles to one block's parameters inside a ParamStore. When the block is
// unshared, the *_prev members hold the previous-frame copies; otherwise they
// alias the current-frame tensors.
struct BlockParams {
  BlockConfig config;
  Tensor cnn_w, cnn_b, cnn_prev_w, cnn_prev_b;
  Tensor pos;  // [N x C]
  Tensor ln1_g, ln1_b;
  Tensor dwc_w, dwc_b, dwc_prev_w, dwc_prev_b;
  Tensor lin_w, lin_b, lin_prev_w, lin_prev_b;
  Tensor wq, wk, wv;
  Tensor alpha;                        // scalar, present when imm is on
  std::vector<Tensor> gate_w, gate_b;  // per head: [N x d], [d]
  Tensor out_w, out_b;
  Tensor ln2_g, ln2_b;
  Tensor ffn1_w, ffn1_b, ffn2_w, ffn2_b;

  static BlockParams create(ParamStore& store, const std::string& prefix,
                            const BlockConfig& config, Rng& rng);
  static BlockParams bind(const ParamStore& store, const std::string& prefix,
                          const BlockConfig& config);
};

struct TokenPair {
  Tensor prev;  // [N x C]
  Tensor curr;
};

// Shared 3x3 CNN on each grid, row-major flatten, plus positional embedding.
TokenPair tokenize(const BevFeature& prev, const BevFeature& curr,
                   const BlockParams& params);

// LayerNorm, depthwise 3x3 conv on the re-gridded tokens, shared linear.
TokenPair preprocess(const TokenPair& tokens, const BlockParams& params);

// Per head: (Q_t K_t^T - alpha Q_{t-1} K_{t-1}^T) / sqrt(d), before SiLU.
std::vector<Tensor> imm_logits(const TokenPair& xbar, const BlockParams& params);
// SiLU(q_curr k_curr^T - alpha q_prev k_prev^T) for one head; q already
// scaled. O(N^2 d).
Tensor motion_weights_from_projections(const Tensor& q_curr, const Tensor& k_curr,
                                       const Tensor& q_prev, const Tensor& k_prev,
                                       const Tensor& alpha);
// Per head motion weights SiLU(imm_logits), each [N x N].
std::vector<Tensor> imm_weights(const TokenPair& xbar, const BlockParams& params);

// SiLU(q) (SiLU(k)^T v), evaluated right-associated: O(N d^2).
Tensor linear_attention_core(const Tensor& q, const Tensor& k, const Tensor& v);
// (SiLU(q) SiLU(k)^T) v, the same product in quadratic order: O(N^2 d).
Tensor quadratic_attention_core(const Tensor& q, const Tensor& k, const Tensor& v);

struct FocusOutput {
  Tensor features;            // [N x C], after the output projection
  std::vector<Tensor> gates;  // per head [N x d], in (0, 1); ones if imm is off
};

// Gated linear attention over the current frame's tokens. `motion_weights` is
// ignored (and may be empty) when the imm toggle is off.
FocusOutput focus_attention(const Tensor& xbar_curr,
                            std::span<const Tensor> motion_weights,
                            const BlockParams& params);

struct BlockOutput {
  Tensor curr;  // F_out, [N x C]
  Tensor prev;  // previous-frame tokens carried to the next stage, [N x C]
  std::vector<Tensor> motion_weights;
  std::vector<Tensor> gates;
};

BlockOutput block_forward(const BevFeature& prev, const BevFeature& curr,
                          const BlockParams& params);

}  // namespace mdtrack

#endif  // MDTRACK_FOCUS_BLOCK_H_
