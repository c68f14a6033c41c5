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

#include "mdtrack/param_store.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mdtrack/errors.h"

namespace mdtrack {
namespace {

constexpr char kMagic[8] = {'M', 'D', 'T', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(std::string file, std::string bytes)
      : file_(std::move(file)), bytes_(std::move(bytes)) {}

  std::uint64_t uint(int width) {
    need(width);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += width;
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }
  [[noreturn]] void fail(const std::string& what,
                         DataErrorKind kind = DataErrorKind::kMalformed) const {
    throw DataError(file_, pos_, what, kind);
  }
  void need(std::size_t n) const {
    if (n > bytes_.size() - pos_) fail("truncated checkpoint", DataErrorKind::kTruncated);
  }

 private:
  std::string file_;
  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ParamStore ParamStore::clone() const {
  ParamStore out;
  for (const auto& name : order_) {
    const Tensor& t = params_.at(name);
    out.add(name, t.shape(), std::vector<double>(t.data().begin(), t.data().end()));
  }
  out.state_ = state_;
  out.step_ = step_;
  return out;
}

Tensor& ParamStore::add(const std::string& name, Shape shape,
                        std::vector<double> values) {
  if (params_.contains(name)) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  order_.push_back(name);
  auto [it, _] = params_.emplace(
      name, Tensor::from_data(std::move(shape), std::move(values), true));
  return it->second;
}

Tensor& ParamStore::add_zeros(const std::string& name, Shape shape) {
  return add_constant(name, std::move(shape), 0.0);
}

Tensor& ParamStore::add_constant(const std::string& name, Shape shape,
                                 double value) {
  std::vector<double> v(shape_numel(shape), value);
  return add(name, std::move(shape), std::move(v));
}

Tensor& ParamStore::add_fan_in(const std::string& name, Shape shape,
                               std::size_t fan_in, Rng& rng) {
  return add_uniform(name, std::move(shape),
                     std::sqrt(3.0 / static_cast<double>(fan_in)), rng);
}

Tensor& ParamStore::add_uniform(const std::string& name, Shape shape,
                                double bound, Rng& rng) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(-bound, bound);
  return add(name, std::move(shape), std::move(v));
}

bool ParamStore::contains(const std::string& name) const {
  return params_.contains(name);
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("no parameter named " + name);
  return it->second;
}

std::size_t ParamStore::total_elements() const { return count_elements(""); }

std::size_t ParamStore::count_elements(const std::string& prefix) const {
  std::size_t n = 0;
  for (const auto& [name, t] : params_) {
    if (name.starts_with(prefix)) n += t.numel();
  }
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [_, t] : params_) t.zero_grad();
}

bool ParamStore::all_grads_present() const {
  for (const auto& [_, t] : params_) {
    if (!t.has_grad()) return false;
  }
  return true;
}

MomentState& ParamStore::moments(const std::string& name) {
  const Tensor& t = at(name);
  MomentState& s = state_[name];
  if (s.m.size() != t.numel()) {
    s.m.assign(t.numel(), 0.0);
    s.v.assign(t.numel(), 0.0);
  }
  return s;
}

void ParamStore::save(const std::filesystem::path& path) const {
  std::string out(kMagic, sizeof(kMagic));
  put_u32(out, kVersion);
  put_u64(out, order_.size());
  for (const auto& name : order_) {
    const Tensor& t = params_.at(name);
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put_u64(out, d);
    for (double v : t.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write checkpoint " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

ParamStore ParamStore::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError(path.string(), 0, "cannot open checkpoint", DataErrorKind::kMissing);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  Reader r(path.string(), std::move(bytes));
  if (r.str(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    r.fail("bad checkpoint magic");
  }
  if (r.uint(4) != kVersion) r.fail("unsupported checkpoint version");
  const std::uint64_t count = r.uint(8);
  ParamStore store;
  for (std::uint64_t p = 0; p < count; ++p) {
    const std::string name = r.str(r.uint(4));
    const std::uint64_t rank = r.uint(4);
    if (rank > 8) r.fail("implausible rank for " + name);
    Shape shape(rank);
    for (auto& d : shape) d = r.uint(8);
    std::uint64_t numel = 1;
    for (auto d : shape) {
      if (d != 0 && numel > (std::uint64_t{1} << 40) / d) r.fail("implausible shape for " + name);
      numel *= d;
    }
    r.need(numel * 8);
    std::vector<double> values(shape_numel(shape));
    for (double& v : values) {
      v = std::bit_cast<double>(r.uint(8));
      if (!std::isfinite(v)) r.fail("non-finite value in " + name);
    }
    store.add(name, std::move(shape), std::move(values));
  }
  if (!r.done()) r.fail("trailing bytes after last parameter");
  return store;
}

void ParamStore::assign_from(const ParamStore& other) {
  if (other.order_ != order_) {
    throw ShapeError("checkpoint parameter names do not match the model");
  }
  for (const auto& name : order_) {
    const Tensor& src = other.at(name);
    const Tensor& dst = at(name);
    if (src.shape() != dst.shape()) {
      throw ShapeError("checkpoint shape mismatch for " + name + ": " +
                       shape_string(src.shape()) + " vs " +
                       shape_string(dst.shape()));
    }
    std::copy(src.data().begin(), src.data().end(), dst.mutable_data().begin());
  }
}

bool ParamStore::same_values(const ParamStore& other) const {
  if (order_ != other.order_) return false;
  for (const auto& name : order_) {
    const Tensor& a = at(name);
    const Tensor& b = other.at(name);
    if (a.shape() != b.shape()) return false;
    if (std::memcmp(a.data().data(), b.data().data(), a.numel() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace mdtrack
