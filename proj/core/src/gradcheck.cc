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

#include "mdtrack/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mdtrack/errors.h"

namespace mdtrack {
namespace {

double scalar_value(const Tensor& y) {
  if (y.numel() != 1) {
    throw ShapeError("gradcheck: function output must be scalar, got " +
                     shape_string(y.shape()));
  }
  return y.item();
}

std::vector<std::size_t> pick_entries(std::size_t n, const GradcheckOptions& o,
                                      Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (o.max_entries == 0 || n <= o.max_entries) return idx;
  std::shuffle(idx.begin(), idx.end(), rng.engine());
  idx.resize(o.max_entries);
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <typename Eval>
GradcheckReport check_tensor(const Tensor& x, std::span<const double> analytic,
                             Eval&& eval, const GradcheckOptions& o, Rng& rng) {
  if (o.stencil != 2 && o.stencil != 4) throw std::invalid_argument("gradcheck: stencil must be 2 or 4");
  GradcheckReport rep;
  auto values = x.mutable_data();
  for (std::size_t i : pick_entries(x.numel(), o, rng)) {
    const double saved = values[i];
    auto at = [&](double step) {
      values[i] = saved + step;
      const double f = eval();
      values[i] = saved;
      return f;
    };
    const double d1 = at(o.eps) - at(-o.eps);
    const double numeric = o.stencil == 4
                               ? (8.0 * d1 - (at(2.0 * o.eps) - at(-2.0 * o.eps))) / (12.0 * o.eps)
                               : d1 / (2.0 * o.eps);
    const double a = analytic.empty() ? 0.0 : analytic[i];
    const double err = relative_error(a, numeric, o.floor);
    ++rep.checked;
    if (err >= rep.max_rel_error) {
      rep.max_rel_error = err;
      rep.analytic = a;
      rep.numeric = numeric;
    }
  }
  return rep;
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

double gradcheck(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                 GradcheckOptions options) {
  if (!x.is_leaf() || !x.requires_grad()) {
    throw std::invalid_argument("gradcheck: x must be a leaf requiring grad");
  }
  x.zero_grad();
  Tensor y = f(x);
  scalar_value(y);
  y.backward();
  std::vector<double> analytic(x.grad().begin(), x.grad().end());
  x.zero_grad();
  Rng rng(options.seed);
  auto eval = [&] {
    NoGradGuard guard;
    return scalar_value(f(x));
  };
  return check_tensor(x, analytic, eval, options, rng).max_rel_error;
}

std::vector<GradcheckReport> gradcheck_params(const std::function<Tensor()>& loss,
                                              ParamStore& store,
                                              GradcheckOptions options) {
  store.zero_grad();
  Tensor y = loss();
  scalar_value(y);
  y.backward();
  std::vector<std::vector<double>> analytic;
  for (const auto& name : store.names()) {
    auto g = store.at(name).grad();
    analytic.emplace_back(g.begin(), g.end());
  }
  store.zero_grad();
  Rng rng(options.seed);
  auto eval = [&] {
    NoGradGuard guard;
    return scalar_value(loss());
  };
  std::vector<GradcheckReport> reports;
  for (std::size_t p = 0; p < store.names().size(); ++p) {
    const auto& name = store.names()[p];
    GradcheckReport rep = check_tensor(store.at(name), analytic[p], eval, options, rng);
    rep.name = name;
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace mdtrack
