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

#ifndef MDTRACK_PARAM_STORE_H_
#define MDTRACK_PARAM_STORE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mdtrack/tensor.h"

namespace mdtrack {

// Seeded generator threaded through initialization, sampling and
// augmentation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  std::uint64_t next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Per-parameter AdamW moments.
struct MomentState {
  std::vector<double> m;
  std::vector<double> v;
};

// Named learnable tensors plus optimizer state. Names are unique and shapes
// are fixed once a parameter is created. Iteration follows creation order.
class ParamStore {
 public:
  ParamStore() = default;

  // Deep copy: values are duplicated so the clone can be trained separately.
  ParamStore clone() const;

  Tensor& add(const std::string& name, Shape shape, std::vector<double> values);
  Tensor& add_zeros(const std::string& name, Shape shape);
  Tensor& add_constant(const std::string& name, Shape shape, double value);
  // Uniform in +-sqrt(3 / fan_in), i.e. unit-gain fan-in scaling.
  Tensor& add_fan_in(const std::string& name, Shape shape, std::size_t fan_in,
                     Rng& rng);
  Tensor& add_uniform(const std::string& name, Shape shape, double bound, Rng& rng);

  bool contains(const std::string& name) const;
  const Tensor& at(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }
  std::size_t size() const { return order_.size(); }
  std::size_t total_elements() const;
  // Number of elements held by parameters whose name starts with `prefix`.
  std::size_t count_elements(const std::string& prefix) const;

  void zero_grad();
  bool all_grads_present() const;

  MomentState& moments(const std::string& name);
  std::uint64_t step_count() const { return step_; }
  void increment_step() { ++step_; }

  // Flat little-endian container: magic, version, count, then per parameter
  // name, shape and row-major doubles.
  void save(const std::filesystem::path& path) const;
  static ParamStore load(const std::filesystem::path& path);
  // Copies values from `other`; names and shapes must match exactly.
  void assign_from(const ParamStore& other);

  // Bitwise equality of names, shapes and values.
  bool same_values(const ParamStore& other) const;

 private:
  std::map<std::string, Tensor> params_;
  std::map<std::string, MomentState> state_;
  std::vector<std::string> order_;
  std::uint64_t step_ = 0;
};

}  // namespace mdtrack

#endif  // MDTRACK_PARAM_STORE_H_
