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

#include "mdtrack/attention_bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

#include "mdtrack/errors.h"
#include "mdtrack/focus_block.h"
#include "mdtrack/ops.h"
#include "mdtrack/param_store.h"

namespace mdtrack {
namespace {

Tensor random_matrix(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<double> v(n * d);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return Tensor::from_data({n, d}, std::move(v));
}

template <typename F>
std::pair<std::uint64_t, double> measure(std::size_t repeats, F&& f) {
  std::uint64_t macs = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
    MacCounter counter;
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    macs = counter.count();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return {macs, best};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

Tensor softmax_attention_baseline(const Tensor& q, const Tensor& k, const Tensor& v) {
  const double scale_factor = 1.0 / std::sqrt(static_cast<double>(q.dim(1)));
  return matmul(softmax_rows(scale(matmul(q, transpose(k)), scale_factor)), v);
}

std::uint64_t linear_core_macs(std::size_t n, std::size_t d) {
  return 2ull * n * d * d;
}

std::uint64_t softmax_macs(std::size_t n, std::size_t d) { return 2ull * n * n * d; }

std::uint64_t motion_weight_macs(std::size_t n, std::size_t d) { return 2ull * n * n * d; }

std::vector<BenchRecord> bench_attention(std::span<const std::size_t> ns, std::size_t d,
                                         std::size_t repeats, std::uint64_t seed) {
  if (ns.size() < 4) throw ConfigError("bench: need at least four token counts");
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) throw ConfigError("bench: token counts must strictly increase");
  }
  if (ns.front() == 0 || d == 0) throw ConfigError("bench: N and d must be positive");
  NoGradGuard no_grad;
  Rng rng(seed);
  const Tensor alpha = Tensor::scalar(0.5);
  std::vector<BenchRecord> out;
  for (std::size_t n : ns) {
    const Tensor q = random_matrix(n, d, rng), k = random_matrix(n, d, rng),
                 v = random_matrix(n, d, rng), qp = random_matrix(n, d, rng),
                 kp = random_matrix(n, d, rng);
    BenchRecord r;
    r.n = n;
    r.d = d;
    std::tie(r.linear_macs, r.linear_ms) =
        measure(repeats, [&] { linear_attention_core(q, k, v); });
    std::tie(r.softmax_macs, r.softmax_ms) =
        measure(repeats, [&] { softmax_attention_baseline(q, k, v); });
    std::tie(r.motion_macs, r.motion_ms) =
        measure(repeats, [&] { motion_weights_from_projections(q, k, qp, kp, alpha); });
    out.push_back(r);
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope: need matching series of length >= 2");
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

template <typename Get>
double slope_of(std::span<const BenchRecord> records, Get get) {
  std::vector<double> x, y;
  for (const auto& r : records) {
    x.push_back(static_cast<double>(r.n));
    y.push_back(std::max(get(r), 1e-9));
  }
  return loglog_slope(x, y);
}

}  // namespace

ScalingSlopes count_slopes(std::span<const BenchRecord> records) {
  return {slope_of(records, [](const BenchRecord& r) { return double(r.linear_macs); }),
          slope_of(records, [](const BenchRecord& r) { return double(r.softmax_macs); }),
          slope_of(records, [](const BenchRecord& r) { return double(r.motion_macs); })};
}

ScalingSlopes time_slopes(std::span<const BenchRecord> records) {
  return {slope_of(records, [](const BenchRecord& r) { return r.linear_ms; }),
          slope_of(records, [](const BenchRecord& r) { return r.softmax_ms; }),
          slope_of(records, [](const BenchRecord& r) { return r.motion_ms; })};
}

bool slopes_within_tolerance(const ScalingSlopes& s, double tolerance) {
  return std::abs(s.linear - 1.0) <= tolerance && std::abs(s.softmax - 2.0) <= tolerance &&
         std::abs(s.motion - 2.0) <= tolerance;
}

void write_bench_csv(std::span<const BenchRecord> records, std::ostream& out) {
  out << "n,d,linear_macs,softmax_macs,motion_macs,linear_ms,softmax_ms,motion_ms\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.d << ',' << r.linear_macs << ',' << r.softmax_macs << ','
        << r.motion_macs << ',' << fmt("%.6f", r.linear_ms) << ','
        << fmt("%.6f", r.softmax_ms) << ',' << fmt("%.6f", r.motion_ms) << '\n';
  }
}

std::string scaling_report(std::span<const BenchRecord> records) {
  const ScalingSlopes c = count_slopes(records);
  const ScalingSlopes t = time_slopes(records);
  auto line = [](const char* name, double slope, double expected, double timed) {
    const bool ok = std::abs(slope - expected) <= kSlopeTolerance;
    return std::string(name) + "  count slope " + fmt("%.4f", slope) + " (expect " +
           fmt("%.0f", expected) + " +/- " + fmt("%.2f", kSlopeTolerance) + ") " +
           (ok ? "ok" : "FAIL") + "  time slope " + fmt("%.3f", timed) + "\n";
  };
  std::string out = "attention scaling over N = ";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out += (i ? "," : "") + std::to_string(records[i].n);
  }
  out += ", d = " + (records.empty() ? std::string("?") : std::to_string(records[0].d)) + "\n";
  out += line("linear core  ", c.linear, 1.0, t.linear);
  out += line("softmax      ", c.softmax, 2.0, t.softmax);
  out += line("motion W_m   ", c.motion, 2.0, t.motion);
  return out;
}

}  // namespace mdtrack
