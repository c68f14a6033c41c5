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

#include "mdtrack/metrics.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdtrack {
namespace {

double cross(const std::array<double, 2>& o, const std::array<double, 2>& a,
             const std::array<double, 2>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::array<double, 2> intersect(const std::array<double, 2>& p, const std::array<double, 2>& q,
                                const std::array<double, 2>& a,
                                const std::array<double, 2>& b) {
  const double cp = cross(a, b, p), cq = cross(a, b, q);
  const double t = cp / (cp - cq);
  return {p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])};
}

Polygon corners(const Box3D& b) {
  const auto c = b.bev_corners();
  return {c.begin(), c.end()};
}

std::vector<double> sorted(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Fraction of values > x and >= x.
std::pair<double, double> above(const std::vector<double>& s, double x) {
  const double n = static_cast<double>(s.size());
  const auto lo = std::lower_bound(s.begin(), s.end(), x);
  const auto hi = std::upper_bound(s.begin(), s.end(), x);
  return {static_cast<double>(s.end() - hi) / n, static_cast<double>(s.end() - lo) / n};
}

double grid_value(std::size_t k, double max) {
  return max * static_cast<double>(k) / static_cast<double>(kOpeGridPoints - 1);
}

}  // namespace

Polygon clip_polygon(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const auto& a = clip[e];
    const auto& b = clip[(e + 1) % clip.size()];
    Polygon in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto& p = in[i];
      const auto& q = in[(i + 1) % in.size()];
      const bool p_in = cross(a, b, p) >= -kClipEpsilon;
      const bool q_in = cross(a, b, q) >= -kClipEpsilon;
      if (p_in) out.push_back(p);
      if (p_in != q_in) out.push_back(intersect(p, q, a, b));
    }
  }
  return out;
}

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    twice += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(twice);
}

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  return polygon_area(clip_polygon(corners(a), corners(b)));
}

double iou3d(const Box3D& a, const Box3D& b) {
  if (!(a.volume() > 0.0) || !(b.volume() > 0.0)) {
    throw std::invalid_argument("iou3d: degenerate box");
  }
  if (a == b) return 1.0;
  const double z_lo = std::max(a.z - 0.5 * a.h, b.z - 0.5 * b.h);
  const double z_hi = std::min(a.z + 0.5 * a.h, b.z + 0.5 * b.h);
  const double overlap = std::max(0.0, z_hi - z_lo);
  if (overlap == 0.0) return 0.0;
  const double inter = bev_intersection_area(a, b) * overlap;
  const double uni = a.volume() + b.volume() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double center_distance(const Box3D& a, const Box3D& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

std::vector<double> success_curve(std::span<const double> ious) {
  const auto s = sorted(ious);
  std::vector<double> curve(kOpeGridPoints, 0.0);
  if (s.empty()) return curve;
  for (std::size_t k = 0; k < kOpeGridPoints; ++k) {
    const auto [gt, ge] = above(s, grid_value(k, 1.0));
    if (k == 0) {
      curve[k] = gt;
    } else if (k + 1 == kOpeGridPoints) {
      curve[k] = ge;
    } else {
      curve[k] = 0.5 * (gt + ge);
    }
  }
  return curve;
}

std::vector<double> precision_curve(std::span<const double> distances) {
  const auto s = sorted(distances);
  std::vector<double> curve(kOpeGridPoints, 0.0);
  if (s.empty()) return curve;
  for (std::size_t k = 0; k < kOpeGridPoints; ++k) {
    const auto [gt, ge] = above(s, grid_value(k, kPrecisionMaxDistance));
    const double lt = 1.0 - ge, le = 1.0 - gt;
    if (k == 0) {
      curve[k] = le;
    } else if (k + 1 == kOpeGridPoints) {
      curve[k] = lt;
    } else {
      curve[k] = 0.5 * (lt + le);
    }
  }
  return curve;
}

double curve_auc(std::span<const double> curve) {
  if (curve.size() < 2) return 0.0;
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) area += curve[k] + curve[k + 1];
  return area / (2.0 * static_cast<double>(curve.size() - 1));
}

OpeResult ope(std::span<const Box3D> pred, std::span<const Box3D> gt) {
  if (pred.size() != gt.size()) {
    throw std::invalid_argument("ope: tracklet has " + std::to_string(pred.size()) +
                                " boxes, ground truth " + std::to_string(gt.size()));
  }
  if (gt.size() < 2) throw std::invalid_argument("ope: need at least two frames");
  OpeResult r;
  for (std::size_t t = 1; t < gt.size(); ++t) {
    r.ious.push_back(iou3d(pred[t], gt[t]));
    r.distances.push_back(center_distance(pred[t], gt[t]));
  }
  r.success_auc = curve_auc(success_curve(r.ious));
  r.precision_auc = curve_auc(precision_curve(r.distances));
  return r;
}

OpeResult summarize_ope(std::span<const OpeResult> parts) {
  OpeResult r;
  for (const auto& p : parts) {
    r.ious.insert(r.ious.end(), p.ious.begin(), p.ious.end());
    r.distances.insert(r.distances.end(), p.distances.begin(), p.distances.end());
  }
  r.success_auc = curve_auc(success_curve(r.ious));
  r.precision_auc = curve_auc(precision_curve(r.distances));
  return r;
}

}  // namespace mdtrack
