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

#include "mdtrack/optim.h"

#include <cmath>
#include <stdexcept>

#include "mdtrack/errors.h"

namespace mdtrack {

void adamw_step(ParamStore& store, const AdamWOptions& o, bool zero_grad_after) {
  for (const auto& name : store.names()) {
    if (!store.at(name).has_grad()) {
      throw std::logic_error("adamw_step: no gradient for " + name);
    }
    for (double g : store.at(name).grad()) {
      if (!std::isfinite(g)) throw NumericError("adamw_step: non-finite gradient for " + name);
    }
  }
  store.increment_step();
  const double t = static_cast<double>(store.step_count());
  const double bc1 = 1.0 - std::pow(o.beta1, t);
  const double bc2 = 1.0 - std::pow(o.beta2, t);
  for (const auto& name : store.names()) {
    const Tensor& p = store.at(name);
    MomentState& s = store.moments(name);
    auto values = p.mutable_data();
    auto grad = p.grad();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad[i];
      s.m[i] = o.beta1 * s.m[i] + (1.0 - o.beta1) * g;
      s.v[i] = o.beta2 * s.v[i] + (1.0 - o.beta2) * g * g;
      const double mhat = s.m[i] / bc1;
      const double vhat = s.v[i] / bc2;
      values[i] -= o.lr * o.weight_decay * values[i];
      values[i] -= o.lr * mhat / (std::sqrt(vhat) + o.eps);
    }
  }
  if (zero_grad_after) store.zero_grad();
}

double step_decay_lr(double base_lr, int epoch, double factor, int interval) {
  return base_lr / std::pow(factor, epoch / interval);
}

}  // namespace mdtrack
