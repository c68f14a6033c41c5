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

// Wall-clock scaling of the attention paths and a full desk-scale forward.

#include <benchmark/benchmark.h>

#include <vector>

#include "mdtrack/attention_bench.h"
#include "mdtrack/focus_block.h"
#include "mdtrack/model.h"
#include "mdtrack/ops.h"
#include "mdtrack/scene.h"
#include "mdtrack/tensor.h"

namespace {

using mdtrack::Tensor;

Tensor random_matrix(std::size_t n, std::size_t d, mdtrack::Rng& rng) {
  std::vector<double> v(n * d);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return Tensor::from_data({n, d}, std::move(v));
}

constexpr std::size_t kHeadWidth = 16;

void BM_LinearCore(benchmark::State& state) {
  mdtrack::NoGradGuard no_grad;
  mdtrack::Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor q = random_matrix(n, kHeadWidth, rng), k = random_matrix(n, kHeadWidth, rng),
               v = random_matrix(n, kHeadWidth, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mdtrack::linear_attention_core(q, k, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LinearCore)->RangeMultiplier(2)->Range(256, 2048)->Complexity(benchmark::oN);

void BM_SoftmaxBaseline(benchmark::State& state) {
  mdtrack::NoGradGuard no_grad;
  mdtrack::Rng rng(2);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor q = random_matrix(n, kHeadWidth, rng), k = random_matrix(n, kHeadWidth, rng),
               v = random_matrix(n, kHeadWidth, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mdtrack::softmax_attention_baseline(q, k, v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SoftmaxBaseline)->RangeMultiplier(2)->Range(256, 2048)->Complexity(benchmark::oNSquared);

void BM_MotionWeights(benchmark::State& state) {
  mdtrack::NoGradGuard no_grad;
  mdtrack::Rng rng(3);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor qc = random_matrix(n, kHeadWidth, rng), kc = random_matrix(n, kHeadWidth, rng),
               qp = random_matrix(n, kHeadWidth, rng), kp = random_matrix(n, kHeadWidth, rng);
  const Tensor alpha = Tensor::scalar(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mdtrack::motion_weights_from_projections(qc, kc, qp, kp, alpha));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MotionWeights)->RangeMultiplier(2)->Range(256, 2048)->Complexity(benchmark::oNSquared);

void BM_DeskForward(benchmark::State& state) {
  mdtrack::NoGradGuard no_grad;
  mdtrack::SceneConfig sc;
  sc.frames = 2;
  const auto seq = mdtrack::generate(sc);
  const mdtrack::FramePair pair{&seq.frames[0], &seq.frames[1], seq.gt[0], seq.gt[1]};
  const mdtrack::TrackerModel model(mdtrack::ModelConfig::desk(), 1);
  const auto sample = mdtrack::make_sample(pair, pair.prev_box, model.config().crop);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(sample.prev, sample.curr));
}
BENCHMARK(BM_DeskForward)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
