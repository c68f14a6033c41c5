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

#ifndef MDTRACK_GRADCHECK_H_
#define MDTRACK_GRADCHECK_H_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mdtrack/param_store.h"
#include "mdtrack/tensor.h"

namespace mdtrack {

struct GradcheckOptions {
  double eps = 1e-5;
  // Central-difference stencil width: 2 (error O(eps^2)) or 4 (O(eps^4)).
  int stencil = 2;
  // Denominator floor for the relative error |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // Entries checked per tensor; 0 checks all of them.
  std::size_t max_entries = 0;
  std::uint64_t seed = 0;
};

struct GradcheckReport {
  std::string name;
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  double analytic = 0.0;  // at the worst entry
  double numeric = 0.0;
};

double relative_error(double analytic, double numeric, double floor);

// Compares the tape gradient of scalar f at leaf x against central
// differences and returns the largest relative error. NaN/Inf in any forward
// evaluation raises NumericError; a non-scalar f raises ShapeError.
double gradcheck(const std::function<Tensor(const Tensor&)>& f, const Tensor& x,
                 GradcheckOptions options = {});

// Same check over every parameter of `store`, one report per parameter.
std::vector<GradcheckReport> gradcheck_params(const std::function<Tensor()>& loss,
                                              ParamStore& store,
                                              GradcheckOptions options = {});

}  // namespace mdtrack

#endif  // MDTRACK_GRADCHECK_H_
