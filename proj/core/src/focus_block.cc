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

#include "mdtrack/focus_block.h"

#include <cmath>

#include "mdtrack/errors.h"
#include "mdtrack/ops.h"

namespace mdtrack {
namespace {

constexpr double kPosEmbedBound = 0.02;

Tensor tokens_to_grid(const Tensor& tokens, const BlockConfig& c) {
  return reshape(tokens, {c.grid_h, c.grid_w, c.channels});
}

Tensor grid_to_tokens(const Tensor& grid, const BlockConfig& c) {
  return reshape(grid, {c.tokens(), c.channels});
}

Tensor preprocess_one(const Tensor& x, const BlockParams& p, const Tensor& dwc_w,
                      const Tensor& dwc_b, const Tensor& lin_w, const Tensor& lin_b) {
  const BlockConfig& c = p.config;
  Tensor y = layernorm(x, p.ln1_g, p.ln1_b);
  if (c.toggles.dwc) {
    y = grid_to_tokens(
        conv2d(tokens_to_grid(y, c), dwc_w, dwc_b, {.stride = 1, .padding = 1, .depthwise = true}),
        c);
  }
  if (c.toggles.linear) y = linear(y, lin_w, lin_b);
  return y;
}

}  // namespace

void BlockConfig::validate() const {
  if (grid_h == 0 || grid_w == 0 || channels == 0) {
    throw ConfigError("block grid and channels must be positive");
  }
  if (heads == 0 || channels % heads != 0) {
    throw ConfigError("channels (" + std::to_string(channels) +
                      ") must be divisible by heads (" + std::to_string(heads) + ")");
  }
  if (ffn_expansion == 0) throw ConfigError("ffn expansion must be positive");
}

BlockParams BlockParams::create(ParamStore& store, const std::string& prefix,
                                const BlockConfig& config, Rng& rng) {
  config.validate();
  const std::size_t c = config.channels, n = config.tokens(), d = config.head_dim();
  const std::size_t e = config.ffn_expansion * c;
  auto conv = [&](const std::string& name) {
    store.add_fan_in(prefix + "." + name + ".w", {3, 3, c, c}, 9 * c, rng);
    store.add_zeros(prefix + "." + name + ".b", {c});
  };
  auto dwconv = [&](const std::string& name) {
    store.add_fan_in(prefix + "." + name + ".w", {3, 3, c}, 9, rng);
    store.add_zeros(prefix + "." + name + ".b", {c});
  };
  auto dense = [&](const std::string& name, std::size_t in, std::size_t out) {
    store.add_fan_in(prefix + "." + name + ".w", {in, out}, in, rng);
    store.add_zeros(prefix + "." + name + ".b", {out});
  };
  const bool unshared = !config.toggles.shared;

  conv("cnn");
  if (unshared) conv("cnn_prev");
  store.add_uniform(prefix + ".pos", {n, c}, kPosEmbedBound, rng);
  store.add_constant(prefix + ".ln1.g", {c}, 1.0);
  store.add_zeros(prefix + ".ln1.b", {c});
  if (config.toggles.dwc) {
    dwconv("dwc");
    if (unshared) dwconv("dwc_prev");
  }
  if (config.toggles.linear) {
    dense("lin", c, c);
    if (unshared) dense("lin_prev", c, c);
  }
  store.add_fan_in(prefix + ".wq", {c, c}, c, rng);
  store.add_fan_in(prefix + ".wk", {c, c}, c, rng);
  store.add_fan_in(prefix + ".wv", {c, c}, c, rng);
  if (config.toggles.imm) {
    store.add(prefix + ".alpha", {}, {config.alpha_init});
    for (std::size_t h = 0; h < config.heads; ++h) {
      dense("gate" + std::to_string(h), n, d);
    }
  }
  dense("out", c, c);
  store.add_constant(prefix + ".ln2.g", {c}, 1.0);
  store.add_zeros(prefix + ".ln2.b", {c});
  dense("ffn1", c, e);
  dense("ffn2", e, c);
  return bind(store, prefix, config);
}

BlockParams BlockParams::bind(const ParamStore& store, const std::string& prefix,
                              const BlockConfig& config) {
  config.validate();
  auto get = [&](const std::string& name) { return store.at(prefix + "." + name); };
  const bool unshared = !config.toggles.shared;
  BlockParams p;
  p.config = config;
  p.cnn_w = get("cnn.w");
  p.cnn_b = get("cnn.b");
  p.cnn_prev_w = unshared ? get("cnn_prev.w") : p.cnn_w;
  p.cnn_prev_b = unshared ? get("cnn_prev.b") : p.cnn_b;
  p.pos = get("pos");
  if (p.pos.shape() != Shape{config.tokens(), config.channels}) {
    throw ShapeError(prefix + ".pos has shape " + shape_string(p.pos.shape()) +
                     ", block expects " + std::to_string(config.tokens()) + " tokens");
  }
  p.ln1_g = get("ln1.g");
  p.ln1_b = get("ln1.b");
  if (config.toggles.dwc) {
    p.dwc_w = get("dwc.w");
    p.dwc_b = get("dwc.b");
    p.dwc_prev_w = unshared ? get("dwc_prev.w") : p.dwc_w;
    p.dwc_prev_b = unshared ? get("dwc_prev.b") : p.dwc_b;
  }
  if (config.toggles.linear) {
    p.lin_w = get("lin.w");
    p.lin_b = get("lin.b");
    p.lin_prev_w = unshared ? get("lin_prev.w") : p.lin_w;
    p.lin_prev_b = unshared ? get("lin_prev.b") : p.lin_b;
  }
  p.wq = get("wq");
  p.wk = get("wk");
  p.wv = get("wv");
  if (config.toggles.imm) {
    p.alpha = get("alpha");
    for (std::size_t h = 0; h < config.heads; ++h) {
      p.gate_w.push_back(get("gate" + std::to_string(h) + ".w"));
      p.gate_b.push_back(get("gate" + std::to_string(h) + ".b"));
    }
  }
  p.out_w = get("out.w");
  p.out_b = get("out.b");
  p.ln2_g = get("ln2.g");
  p.ln2_b = get("ln2.b");
  p.ffn1_w = get("ffn1.w");
  p.ffn1_b = get("ffn1.b");
  p.ffn2_w = get("ffn2.w");
  p.ffn2_b = get("ffn2.b");
  return p;
}

TokenPair tokenize(const BevFeature& prev, const BevFeature& curr,
                   const BlockParams& params) {
  const BlockConfig& c = params.config;
  const Shape expected{c.grid_h, c.grid_w, c.channels};
  for (const BevFeature* f : {&prev, &curr}) {
    if (f->grid.shape() != expected) {
      throw ShapeError("tokenize: grid " + shape_string(f->grid.shape()) +
                       " does not match block resolution " + shape_string(expected));
    }
  }
  auto embed = [&](const Tensor& grid, const Tensor& w, const Tensor& b) {
    return add(grid_to_tokens(conv2d(grid, w, b), c), params.pos);
  };
  return {embed(prev.grid, params.cnn_prev_w, params.cnn_prev_b),
          embed(curr.grid, params.cnn_w, params.cnn_b)};
}

TokenPair preprocess(const TokenPair& tokens, const BlockParams& params) {
  return {preprocess_one(tokens.prev, params, params.dwc_prev_w, params.dwc_prev_b,
                         params.lin_prev_w, params.lin_prev_b),
          preprocess_one(tokens.curr, params, params.dwc_w, params.dwc_b,
                         params.lin_w, params.lin_b)};
}

std::vector<Tensor> imm_logits(const TokenPair& xbar, const BlockParams& params) {
  const BlockConfig& c = params.config;
  if (!params.alpha.defined()) {
    throw std::logic_error("imm_logits: block was built without the imm module");
  }
  const std::size_t d = c.head_dim();
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  const Tensor q_prev = scale(matmul(xbar.prev, params.wq), inv_sqrt_d);
  const Tensor k_prev = matmul(xbar.prev, params.wk);
  const Tensor q_curr = scale(matmul(xbar.curr, params.wq), inv_sqrt_d);
  const Tensor k_curr = matmul(xbar.curr, params.wk);
  std::vector<Tensor> out;
  for (std::size_t h = 0; h < c.heads; ++h) {
    const std::size_t lo = h * d, hi = lo + d;
    Tensor sim_curr = matmul(slice_cols(q_curr, lo, hi), transpose(slice_cols(k_curr, lo, hi)));
    Tensor sim_prev = matmul(slice_cols(q_prev, lo, hi), transpose(slice_cols(k_prev, lo, hi)));
    out.push_back(sub(sim_curr, scale_by(sim_prev, params.alpha)));
  }
  return out;
}

Tensor motion_weights_from_projections(const Tensor& q_curr, const Tensor& k_curr,
                                       const Tensor& q_prev, const Tensor& k_prev,
                                       const Tensor& alpha) {
  return silu(sub(matmul(q_curr, transpose(k_curr)),
                  scale_by(matmul(q_prev, transpose(k_prev)), alpha)));
}

std::vector<Tensor> imm_weights(const TokenPair& xbar, const BlockParams& params) {
  std::vector<Tensor> out;
  for (const Tensor& logits : imm_logits(xbar, params)) out.push_back(silu(logits));
  return out;
}

Tensor linear_attention_core(const Tensor& q, const Tensor& k, const Tensor& v) {
  return matmul(silu(q), matmul(transpose(silu(k)), v));
}

Tensor quadratic_attention_core(const Tensor& q, const Tensor& k, const Tensor& v) {
  return matmul(matmul(silu(q), transpose(silu(k))), v);
}

FocusOutput focus_attention(const Tensor& xbar_curr,
                            std::span<const Tensor> motion_weights,
                            const BlockParams& params) {
  const BlockConfig& c = params.config;
  const std::size_t d = c.head_dim();
  if (c.toggles.imm && motion_weights.size() != c.heads) {
    throw ShapeError("focus_attention: need one motion-weight matrix per head");
  }
  const Tensor q = matmul(xbar_curr, params.wq);
  const Tensor k = matmul(xbar_curr, params.wk);
  const Tensor v = matmul(xbar_curr, params.wv);
  FocusOutput out;
  std::vector<Tensor> heads;
  for (std::size_t h = 0; h < c.heads; ++h) {
    const std::size_t lo = h * d, hi = lo + d;
    Tensor core = linear_attention_core(slice_cols(q, lo, hi), slice_cols(k, lo, hi),
                                        slice_cols(v, lo, hi));
    if (c.toggles.imm) {
      Tensor gate = sigmoid(linear(motion_weights[h], params.gate_w[h], params.gate_b[h]));
      core = mul(core, gate);
      out.gates.push_back(gate);
    } else {
      out.gates.push_back(Tensor::full({c.tokens(), d}, 1.0));
    }
    heads.push_back(core);
  }
  Tensor merged = heads.size() == 1 ? heads[0] : concat_cols(heads);
  out.features = linear(merged, params.out_w, params.out_b);
  return out;
}

BlockOutput block_forward(const BevFeature& prev, const BevFeature& curr,
                          const BlockParams& params) {
  const TokenPair tokens = tokenize(prev, curr, params);
  const TokenPair xbar = preprocess(tokens, params);
  BlockOutput out;
  if (params.config.toggles.imm) out.motion_weights = imm_weights(xbar, params);
  FocusOutput focus = focus_attention(xbar.curr, out.motion_weights, params);
  out.gates = std::move(focus.gates);
  const Tensor fused = add(focus.features, tokens.curr);
  const Tensor ffn = linear(silu(linear(layernorm(fused, params.ln2_g, params.ln2_b),
                                        params.ffn1_w, params.ffn1_b)),
                            params.ffn2_w, params.ffn2_b);
  out.curr = add(ffn, fused);
  out.prev = tokens.prev;
  return out;
}

}  // namespace mdtrack
