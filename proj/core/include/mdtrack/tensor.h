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

#ifndef MDTRACK_TENSOR_H_
#define MDTRACK_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mdtrack {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

// One value in the autodiff graph. Leaves (parameters, inputs) have no
// inputs and no backward function.
struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until something is accumulated
  bool requires_grad = false;
  bool is_leaf = true;
  std::uint64_t seq = 0;
  std::string op;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into the inputs' grads.
  std::function<void(Node&)> backward;

  std::vector<double>& ensure_grad();
};

}  // namespace detail

// Dense row-major double tensor with reverse-mode gradient support.
//
// A Tensor is a shared handle: copies alias the same storage. Values produced
// by ops are immutable; only leaves expose mutable_data() so that optimizers
// and finite-difference checks can update parameters between passes.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  // Empty when no gradient has been accumulated.
  std::span<const double> grad() const;
  bool has_grad() const;
  bool requires_grad() const;
  bool is_leaf() const;
  const std::string& op() const;

  double item() const;
  double operator[](std::size_t i) const { return data()[i]; }

  // Reverse pass from a single-element tensor; seeds d(self)/d(self) = 1.
  void backward() const;
  void zero_grad() const;

  std::span<double> mutable_data() const;  // leaves only
  std::span<double> mutable_grad() const;  // allocates on demand

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

// Ordered record of the ops reachable from a root that need gradients.
// Entries are kept in execution order; backward replays them in reverse.
class GradTape {
 public:
  static GradTape record(const Tensor& root);

  void backward(const Tensor& root) const;
  std::size_t size() const { return nodes_.size(); }
  std::vector<std::string> op_names() const;

 private:
  std::vector<detail::Node*> nodes_;
};

// Disables graph recording on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Counts forward matmul multiply-adds on this thread since construction.
class MacCounter {
 public:
  MacCounter();
  std::uint64_t count() const;

 private:
  std::uint64_t start_;
};

namespace detail {
void add_macs(std::uint64_t n);

// Builds an op output. `backward` is only kept when some input needs grad and
// recording is enabled. Throws NumericError if `data` has a non-finite value.
Tensor make_result(const std::string& op, Shape shape, std::vector<double> data,
                   std::vector<Tensor> inputs,
                   std::function<void(Node&)> backward);
}  // namespace detail

}  // namespace mdtrack

#endif  // MDTRACK_TENSOR_H_
