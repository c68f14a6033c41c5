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

#include "mdtrack/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdtrack/errors.h"
#include "mdtrack/geometry.h"

namespace mdtrack {

using detail::make_result;
using detail::Node;

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) +
                     ", got " + shape_string(t.shape()));
  }
}

bool wants(const Node& self, std::size_t i) {
  return self.inputs[i]->requires_grad;
}

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return make_result("add", a.shape(), std::move(out), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (!wants(self, k)) continue;
      auto& g = self.inputs[k]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return make_result("sub", a.shape(), std::move(out), {a, b}, [](Node& self) {
    if (wants(self, 0)) {
      auto& g = self.inputs[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self, 1)) {
      auto& g = self.inputs[1]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return make_result("mul", a.shape(), std::move(out), {a, b}, [](Node& self) {
    const auto& da = self.inputs[0]->data;
    const auto& db = self.inputs[1]->data;
    if (wants(self, 0)) {
      auto& g = self.inputs[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * db[i];
    }
    if (wants(self, 1)) {
      auto& g = self.inputs[1]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * da[i];
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * factor;
  return make_result("scale", x.shape(), std::move(out), {x},
                     [factor](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i) {
                         g[i] += self.grad[i] * factor;
                       }
                     });
}

Tensor scale_by(const Tensor& x, const Tensor& s) {
  if (s.numel() != 1) {
    throw ShapeError("scale_by: factor must have one element, got " +
                     shape_string(s.shape()));
  }
  const double f = s[0];
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * f;
  return make_result("scale_by", x.shape(), std::move(out), {x, s},
                     [](Node& self) {
                       const auto& xd = self.inputs[0]->data;
                       const double f = self.inputs[1]->data[0];
                       if (wants(self, 0)) {
                         auto& g = self.inputs[0]->ensure_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) {
                           g[i] += self.grad[i] * f;
                         }
                       }
                       if (wants(self, 1)) {
                         double acc = 0.0;
                         for (std::size_t i = 0; i < xd.size(); ++i) {
                           acc += self.grad[i] * xd[i];
                         }
                         self.inputs[1]->ensure_grad()[0] += acc;
                       }
                     });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  if (x.rank() == 0 || bias.rank() != 1 || bias.dim(0) != x.shape().back()) {
    throw ShapeError("add_bias: bias " + shape_string(bias.shape()) +
                     " does not match last axis of " + shape_string(x.shape()));
  }
  const std::size_t c = bias.dim(0);
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + bias[i % c];
  return make_result("add_bias", x.shape(), std::move(out), {x, bias},
                     [c](Node& self) {
                       if (wants(self, 0)) {
                         auto& g = self.inputs[0]->ensure_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) {
                           g[i] += self.grad[i];
                         }
                       }
                       if (wants(self, 1)) {
                         auto& g = self.inputs[1]->ensure_grad();
                         for (std::size_t i = 0; i < self.grad.size(); ++i) {
                           g[i % c] += self.grad[i];
                         }
                       }
                     });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions disagree " +
                     shape_string(a.shape()) + " x " + shape_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  detail::add_macs(static_cast<std::uint64_t>(m) * k * n);
  return make_result("matmul", {m, n}, std::move(out), {a, b},
                     [m, k, n](Node& self) {
                       const double* pa = self.inputs[0]->data.data();
                       const double* pb = self.inputs[1]->data.data();
                       const double* go = self.grad.data();
                       if (wants(self, 0)) {
                         // dA = dC * B^T
                         double* ga = self.inputs[0]->ensure_grad().data();
                         for (std::size_t i = 0; i < m; ++i) {
                           const double* grow = go + i * n;
                           for (std::size_t p = 0; p < k; ++p) {
                             const double* brow = pb + p * n;
                             double acc = 0.0;
                             for (std::size_t j = 0; j < n; ++j) {
                               acc += grow[j] * brow[j];
                             }
                             ga[i * k + p] += acc;
                           }
                         }
                       }
                       if (wants(self, 1)) {
                         // dB = A^T * dC
                         double* gb = self.inputs[1]->ensure_grad().data();
                         for (std::size_t i = 0; i < m; ++i) {
                           const double* grow = go + i * n;
                           for (std::size_t p = 0; p < k; ++p) {
                             const double av = pa[i * k + p];
                             double* gbrow = gb + p * n;
                             for (std::size_t j = 0; j < n; ++j) {
                               gbrow[j] += av * grow[j];
                             }
                           }
                         }
                       }
                     });
}

Tensor transpose(const Tensor& a) {
  require_rank("transpose", a, 2);
  const std::size_t r = a.dim(0), c = a.dim(1);
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = a[i * c + j];
  }
  return make_result("transpose", {c, r}, std::move(out), {a},
                     [r, c](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t i = 0; i < r; ++i) {
                         for (std::size_t j = 0; j < c; ++j) {
                           g[i * c + j] += self.grad[j * r + i];
                         }
                       }
                     });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  Tensor y = matmul(x, w);
  return b.defined() ? add_bias(y, b) : y;
}

Tensor silu(const Tensor& x) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * sigmoid_scalar(x[i]);
  return make_result("silu", x.shape(), std::move(out), {x}, [](Node& self) {
    const auto& xd = self.inputs[0]->data;
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = sigmoid_scalar(xd[i]);
      g[i] += self.grad[i] * s * (1.0 + xd[i] * (1.0 - s));
    }
  });
}

Tensor sigmoid(const Tensor& x) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid_scalar(x[i]);
  return make_result("sigmoid", x.shape(), std::move(out), {x}, [](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = self.data[i];
      g[i] += self.grad[i] * s * (1.0 - s);
    }
  });
}

Tensor softmax_rows(const Tensor& x) {
  require_rank("softmax_rows", x, 2);
  const std::size_t r = x.dim(0), c = x.dim(1);
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = x.data().data() + i * c;
    const double mx = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      out[i * c + j] = std::exp(row[j] - mx);
      z += out[i * c + j];
    }
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= z;
  }
  return make_result("softmax_rows", x.shape(), std::move(out), {x},
                     [r, c](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t i = 0; i < r; ++i) {
                         const double* y = self.data.data() + i * c;
                         const double* gy = self.grad.data() + i * c;
                         double dot = 0.0;
                         for (std::size_t j = 0; j < c; ++j) dot += gy[j] * y[j];
                         for (std::size_t j = 0; j < c; ++j) {
                           g[i * c + j] += y[j] * (gy[j] - dot);
                         }
                       }
                     });
}

Tensor layernorm(const Tensor& x, const Tensor& gamma, const Tensor& beta) {
  if (x.rank() == 0 || x.shape().back() == 0) {
    throw ShapeError("layernorm: empty channel axis in " + shape_string(x.shape()));
  }
  const std::size_t c = x.shape().back();
  if (gamma.numel() != c || beta.numel() != c) {
    throw ShapeError("layernorm: affine parameters must have " +
                     std::to_string(c) + " elements");
  }
  const std::size_t rows = x.numel() / c;
  std::vector<double> out(x.numel());
  std::vector<double> xhat(x.numel());
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = x.data().data() + r * c;
    double mu = 0.0;
    for (std::size_t j = 0; j < c; ++j) mu += xr[j];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t j = 0; j < c; ++j) var += (xr[j] - mu) * (xr[j] - mu);
    var /= static_cast<double>(c);
    inv_std[r] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t j = 0; j < c; ++j) {
      xhat[r * c + j] = (xr[j] - mu) * inv_std[r];
      out[r * c + j] = xhat[r * c + j] * gamma[j] + beta[j];
    }
  }
  return make_result(
      "layernorm", x.shape(), std::move(out), {x, gamma, beta},
      [c, rows, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
        const auto& gam = self.inputs[1]->data;
        if (wants(self, 1) || wants(self, 2)) {
          std::vector<double> dg(c, 0.0), db(c, 0.0);
          for (std::size_t i = 0; i < self.grad.size(); ++i) {
            dg[i % c] += self.grad[i] * xhat[i];
            db[i % c] += self.grad[i];
          }
          if (wants(self, 1)) {
            auto& g = self.inputs[1]->ensure_grad();
            for (std::size_t j = 0; j < c; ++j) g[j] += dg[j];
          }
          if (wants(self, 2)) {
            auto& g = self.inputs[2]->ensure_grad();
            for (std::size_t j = 0; j < c; ++j) g[j] += db[j];
          }
        }
        if (!wants(self, 0)) return;
        auto& gx = self.inputs[0]->ensure_grad();
        const double inv_c = 1.0 / static_cast<double>(c);
        for (std::size_t r = 0; r < rows; ++r) {
          double m1 = 0.0, m2 = 0.0;
          for (std::size_t j = 0; j < c; ++j) {
            const double dxh = self.grad[r * c + j] * gam[j];
            m1 += dxh;
            m2 += dxh * xhat[r * c + j];
          }
          m1 *= inv_c;
          m2 *= inv_c;
          for (std::size_t j = 0; j < c; ++j) {
            const double dxh = self.grad[r * c + j] * gam[j];
            gx[r * c + j] += inv_std[r] * (dxh - m1 - xhat[r * c + j] * m2);
          }
        }
      });
}

std::size_t conv_output_size(std::size_t in, int stride, int padding) {
  const long span = static_cast<long>(in) + 2L * padding - 3L;
  if (span < 0) return 0;
  return static_cast<std::size_t>(span / stride + 1);
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
              Conv2dOptions options) {
  require_rank("conv2d", x, 3);
  if (options.stride <= 0) {
    throw ShapeError("conv2d: stride must be positive, got " +
                     std::to_string(options.stride));
  }
  if (options.padding < 0) throw ShapeError("conv2d: negative padding");
  const std::size_t h = x.dim(0), wd = x.dim(1), cin = x.dim(2);
  const bool dw = options.depthwise;
  if (dw) {
    if (w.shape() != Shape{3, 3, cin}) {
      throw ShapeError("conv2d: depthwise kernel " + shape_string(w.shape()) +
                       " needs [3x3x" + std::to_string(cin) + "]");
    }
  } else if (w.rank() != 4 || w.dim(0) != 3 || w.dim(1) != 3 || w.dim(2) != cin) {
    throw ShapeError("conv2d: kernel " + shape_string(w.shape()) +
                     " incompatible with input channels " + std::to_string(cin));
  }
  const std::size_t cout = dw ? cin : w.dim(3);
  if (b.defined() && b.numel() != cout) {
    throw ShapeError("conv2d: bias needs " + std::to_string(cout) + " elements");
  }
  const int stride = options.stride, pad = options.padding;
  const std::size_t ho = conv_output_size(h, stride, pad);
  const std::size_t wo = conv_output_size(wd, stride, pad);
  if (ho == 0 || wo == 0) {
    throw ShapeError("conv2d: input " + shape_string(x.shape()) +
                     " too small for 3x3 kernel with padding " +
                     std::to_string(pad));
  }

  // Visits every (output, input, kernel tap) triple that lands in bounds.
  auto for_each_tap = [=](auto&& fn) {
    for (std::size_t oy = 0; oy < ho; ++oy) {
      for (std::size_t ox = 0; ox < wo; ++ox) {
        for (int ky = 0; ky < 3; ++ky) {
          const long iy = static_cast<long>(oy) * stride + ky - pad;
          if (iy < 0 || iy >= static_cast<long>(h)) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const long ix = static_cast<long>(ox) * stride + kx - pad;
            if (ix < 0 || ix >= static_cast<long>(wd)) continue;
            fn((oy * wo + ox) * cout,
               (static_cast<std::size_t>(iy) * wd + static_cast<std::size_t>(ix)) * cin,
               static_cast<std::size_t>(ky * 3 + kx));
          }
        }
      }
    }
  };

  std::vector<double> out(ho * wo * cout, 0.0);
  const double* px = x.data().data();
  const double* pw = w.data().data();
  for_each_tap([&](std::size_t o, std::size_t i, std::size_t tap) {
    if (dw) {
      const double* wk = pw + tap * cin;
      for (std::size_t c = 0; c < cin; ++c) out[o + c] += px[i + c] * wk[c];
    } else {
      const double* wk = pw + tap * cin * cout;
      for (std::size_t ci = 0; ci < cin; ++ci) {
        const double xv = px[i + ci];
        const double* wrow = wk + ci * cout;
        for (std::size_t co = 0; co < cout; ++co) out[o + co] += xv * wrow[co];
      }
    }
  });
  if (b.defined()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i % cout];
  }

  std::vector<Tensor> inputs{x, w};
  if (b.defined()) inputs.push_back(b);
  return make_result(
      dw ? "dwconv2d" : "conv2d", {ho, wo, cout}, std::move(out), std::move(inputs),
      [for_each_tap, dw, cin, cout](Node& self) {
        const double* px = self.inputs[0]->data.data();
        const double* pw = self.inputs[1]->data.data();
        const double* go = self.grad.data();
        double* gx = wants(self, 0) ? self.inputs[0]->ensure_grad().data() : nullptr;
        double* gw = wants(self, 1) ? self.inputs[1]->ensure_grad().data() : nullptr;
        for_each_tap([&](std::size_t o, std::size_t i, std::size_t tap) {
          if (dw) {
            const double* wk = pw + tap * cin;
            for (std::size_t c = 0; c < cin; ++c) {
              if (gx) gx[i + c] += go[o + c] * wk[c];
              if (gw) gw[tap * cin + c] += go[o + c] * px[i + c];
            }
          } else {
            const double* wk = pw + tap * cin * cout;
            for (std::size_t ci = 0; ci < cin; ++ci) {
              const double* wrow = wk + ci * cout;
              double acc = 0.0;
              for (std::size_t co = 0; co < cout; ++co) acc += go[o + co] * wrow[co];
              if (gx) gx[i + ci] += acc;
              if (gw) {
                double* gwrow = gw + tap * cin * cout + ci * cout;
                const double xv = px[i + ci];
                for (std::size_t co = 0; co < cout; ++co) gwrow[co] += xv * go[o + co];
              }
            }
          }
        });
        if (self.inputs.size() > 2 && wants(self, 2)) {
          auto& gb = self.inputs[2]->ensure_grad();
          for (std::size_t i = 0; i < self.grad.size(); ++i) gb[i % cout] += go[i];
        }
      });
}

Tensor scatter_max(const Tensor& points, std::span<const std::size_t> cell_index,
                   std::size_t grid_cells) {
  require_rank("scatter_max", points, 2);
  const std::size_t p = points.dim(0), c = points.dim(1);
  if (cell_index.size() != p) {
    throw ShapeError("scatter_max: " + std::to_string(cell_index.size()) +
                     " cell indices for " + std::to_string(p) + " points");
  }
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> argmax(grid_cells * c, kNone);
  std::vector<double> out(grid_cells * c, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t cell = cell_index[i];
    if (cell >= grid_cells) {
      throw std::out_of_range("scatter_max: cell index " + std::to_string(cell) +
                              " >= " + std::to_string(grid_cells));
    }
    for (std::size_t j = 0; j < c; ++j) {
      const double v = points[i * c + j];
      std::size_t& am = argmax[cell * c + j];
      // Strict comparison keeps the lowest point index on ties.
      if (am == kNone || v > out[cell * c + j]) {
        am = i;
        out[cell * c + j] = v;
      }
    }
  }
  return make_result("scatter_max", {grid_cells, c}, std::move(out), {points},
                     [argmax = std::move(argmax), c](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t k = 0; k < argmax.size(); ++k) {
                         if (argmax[k] == kNone) continue;
                         g[argmax[k] * c + k % c] += self.grad[k];
                       }
                     });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw ShapeError("reshape: cannot view " + shape_string(x.shape()) + " as " +
                     shape_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return make_result("reshape", std::move(shape), std::move(out), {x},
                     [](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                     });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank("slice_cols", x, 2);
  const std::size_t r = x.dim(0), c = x.dim(1);
  if (begin >= end || end > c) {
    throw ShapeError("slice_cols: bad range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") for " + shape_string(x.shape()));
  }
  const std::size_t w = end - begin;
  std::vector<double> out(r * w);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < w; ++j) out[i * w + j] = x[i * c + begin + j];
  }
  return make_result("slice_cols", {r, w}, std::move(out), {x},
                     [r, c, w, begin](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t i = 0; i < r; ++i) {
                         for (std::size_t j = 0; j < w; ++j) {
                           g[i * c + begin + j] += self.grad[i * w + j];
                         }
                       }
                     });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const std::size_t r = parts[0].dim(0);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& t : parts) {
    require_rank("concat_cols", t, 2);
    if (t.dim(0) != r) throw ShapeError("concat_cols: row count mismatch");
    widths.push_back(t.dim(1));
    total += t.dim(1);
  }
  std::vector<double> out(r * total);
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < widths[k]; ++j) {
        out[i * total + off + j] = parts[k][i * widths[k] + j];
      }
    }
    off += widths[k];
  }
  return make_result("concat_cols", {r, total}, std::move(out),
                     std::vector<Tensor>(parts.begin(), parts.end()),
                     [r, total, widths](Node& self) {
                       std::size_t off = 0;
                       for (std::size_t k = 0; k < widths.size(); ++k) {
                         if (wants(self, k)) {
                           auto& g = self.inputs[k]->ensure_grad();
                           for (std::size_t i = 0; i < r; ++i) {
                             for (std::size_t j = 0; j < widths[k]; ++j) {
                               g[i * widths[k] + j] += self.grad[i * total + off + j];
                             }
                           }
                         }
                         off += widths[k];
                       }
                     });
}

Tensor slice(const Tensor& x, std::size_t begin, std::size_t end) {
  if (begin >= end || end > x.numel()) {
    throw ShapeError("slice: bad range for " + shape_string(x.shape()));
  }
  std::vector<double> out(x.data().begin() + static_cast<long>(begin),
                          x.data().begin() + static_cast<long>(end));
  return make_result("slice", {end - begin}, std::move(out), {x},
                     [begin](Node& self) {
                       auto& g = self.inputs[0]->ensure_grad();
                       for (std::size_t i = 0; i < self.grad.size(); ++i) {
                         g[begin + i] += self.grad[i];
                       }
                     });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  std::vector<double> out;
  for (const auto& t : parts) out.insert(out.end(), t.data().begin(), t.data().end());
  const std::size_t n = out.size();
  return make_result("concat", {n}, std::move(out),
                     std::vector<Tensor>(parts.begin(), parts.end()),
                     [](Node& self) {
                       std::size_t off = 0;
                       for (std::size_t k = 0; k < self.inputs.size(); ++k) {
                         const std::size_t len = self.inputs[k]->data.size();
                         if (wants(self, k)) {
                           auto& g = self.inputs[k]->ensure_grad();
                           for (std::size_t i = 0; i < len; ++i) g[i] += self.grad[off + i];
                         }
                         off += len;
                       }
                     });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  return make_result("sum", {}, {s}, {x}, [](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (double& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  if (x.numel() == 0) throw ShapeError("mean of empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor huber(const Tensor& x, double delta) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double a = std::abs(x[i]);
    out[i] = a <= delta ? 0.5 * x[i] * x[i] : delta * (a - 0.5 * delta);
  }
  return make_result("huber", x.shape(), std::move(out), {x}, [delta](Node& self) {
    const auto& xd = self.inputs[0]->data;
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double d = std::abs(xd[i]) <= delta ? xd[i] : (xd[i] > 0 ? delta : -delta);
      g[i] += self.grad[i] * d;
    }
  });
}

Tensor wrap_angle(const Tensor& x) {
  std::vector<double> out(x.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = wrap_angle(x[i]);
  return make_result("wrap_angle", x.shape(), std::move(out), {x}, [](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

}  // namespace mdtrack
