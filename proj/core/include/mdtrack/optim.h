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

#ifndef MDTRACK_OPTIM_H_
#define MDTRACK_OPTIM_H_

#include "mdtrack/param_store.h"

namespace mdtrack {

struct AdamWOptions {
  double lr = 1e-4;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One decoupled-weight-decay Adam update over every parameter in `store`.
// Throws std::logic_error if a parameter has no accumulated gradient.
void adamw_step(ParamStore& store, const AdamWOptions& options,
                bool zero_grad_after = true);

// Step decay: base_lr / factor^(epoch / interval).
double step_decay_lr(double base_lr, int epoch, double factor = 5.0,
                     int interval = 20);

}  // namespace mdtrack

#endif  // MDTRACK_OPTIM_H_
