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

#include "mdtrack/sequence_io.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>

#include "mdtrack/errors.h"

namespace mdtrack {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw DataError(path.string(), 0, "cannot open file", DataErrorKind::kMissing);
  }
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("short write to " + path.string());
}

void put_f32(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

float get_f32(const std::string& in, std::size_t pos) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return std::bit_cast<float>(bits);
}

std::array<double, 3> triple(const json& j, const char* key, const std::string& file,
                             std::uint64_t line) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    throw DataError(file, line, std::string("field '") + key + "' must be a 3-element array");
  }
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[key][i].is_number()) {
      throw DataError(file, line, std::string("field '") + key + "' must hold numbers");
    }
    out[i] = j[key][i].get<double>();
  }
  return out;
}

}  // namespace

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu.bin", index);
  return buf;
}

void write_points(const PointCloud& cloud, const fs::path& path) {
  std::string bytes;
  bytes.reserve(cloud.size() * 12);
  for (const auto& p : cloud.points) {
    put_f32(bytes, p.x);
    put_f32(bytes, p.y);
    put_f32(bytes, p.z);
  }
  write_file(path, bytes);
}

PointCloud read_points(const fs::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() % 12 != 0) {
    throw DataError(path.string(), bytes.size() - bytes.size() % 12,
                    "truncated point record (" + std::to_string(bytes.size() % 12) +
                        " trailing bytes)",
                    DataErrorKind::kTruncated);
  }
  PointCloud cloud;
  cloud.points.reserve(bytes.size() / 12);
  for (std::size_t pos = 0; pos < bytes.size(); pos += 12) {
    const Point3 p{get_f32(bytes, pos), get_f32(bytes, pos + 4), get_f32(bytes, pos + 8)};
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
      throw DataError(path.string(), pos, "non-finite point coordinate");
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_boxes_jsonl(const std::vector<Box3D>& boxes, const fs::path& path,
                       const std::vector<bool>* flags) {
  std::string out;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const Box3D& b = boxes[i];
    json j = {{"frame", i},
              {"center", {b.x, b.y, b.z}},
              {"size", {b.w, b.h, b.l}},
              {"yaw", b.theta}};
    if (flags) j["coasted"] = static_cast<bool>((*flags)[i]);
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<Box3D> read_boxes_jsonl(const fs::path& path) {
  const std::string text = read_file(path);
  const std::string file = path.string();
  std::vector<Box3D> boxes;
  std::size_t start = 0;
  std::uint64_t line = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    ++line;
    const std::string_view row(text.data() + start, end - start);
    const std::uint64_t offset = start;
    start = end + 1;
    if (row.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j = json::parse(row, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError(file, offset, "line " + std::to_string(line) + " is not a JSON object");
    }
    if (!j.contains("frame") || !j["frame"].is_number_unsigned() ||
        j["frame"].get<std::uint64_t>() != boxes.size()) {
      throw DataError(file, offset,
                      "line " + std::to_string(line) + ": expected frame " +
                          std::to_string(boxes.size()));
    }
    if (!j.contains("yaw") || !j["yaw"].is_number()) {
      throw DataError(file, offset, "line " + std::to_string(line) + ": missing numeric 'yaw'");
    }
    const auto c = triple(j, "center", file, offset);
    const auto s = triple(j, "size", file, offset);
    Box3D b{c[0], c[1], c[2], s[0], s[1], s[2], j["yaw"].get<double>()};
    if (!b.valid()) {
      throw DataError(file, offset, "line " + std::to_string(line) + ": invalid box");
    }
    boxes.push_back(b);
  }
  return boxes;
}

void write_sequence(const LabeledSequence& seq, const SequenceMeta& meta, const fs::path& dir) {
  if (seq.frames.size() != seq.gt.size()) {
    throw std::invalid_argument("write_sequence: frame and label counts differ");
  }
  fs::create_directories(dir / "frames");
  for (std::size_t t = 0; t < seq.size(); ++t) {
    write_points(seq.frames[t], dir / "frames" / frame_file_name(t));
  }
  write_boxes_jsonl(seq.gt, dir / "labels.jsonl");
  json config = json::object();
  for (const auto& [k, v] : meta.config) config[k] = v;
  json m = {{"seed", meta.seed}, {"frames", seq.size()}, {"config", config}};
  write_file(dir / "meta.json", m.dump(2) + "\n");
}

LabeledSequence read_sequence(const fs::path& dir, SequenceMeta* meta) {
  const fs::path meta_path = dir / "meta.json";
  const std::string meta_text = read_file(meta_path);
  json m;
  try {
    m = json::parse(meta_text);
  } catch (const json::parse_error& e) {
    throw DataError(meta_path.string(), e.byte, "malformed header: " + std::string(e.what()));
  }
  if (!m.is_object() || !m.contains("seed") || !m["seed"].is_number_unsigned() ||
      (m.contains("config") && !m["config"].is_object())) {
    throw DataError(meta_path.string(), 0,
                    "malformed header: expected {\"seed\": uint, \"config\": {...}}");
  }
  if (meta) {
    meta->seed = m["seed"].get<std::uint64_t>();
    meta->config.clear();
    if (m.contains("config")) {
      for (const auto& [k, v] : m["config"].items()) {
        meta->config.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
  }

  LabeledSequence seq;
  const fs::path labels_path = dir / "labels.jsonl";
  seq.gt = read_boxes_jsonl(labels_path);
  std::size_t frames = 0;
  while (fs::exists(dir / "frames" / frame_file_name(frames))) ++frames;
  if (frames != seq.gt.size()) {
    throw DataError(labels_path.string(), fs::file_size(labels_path),
                    std::to_string(seq.gt.size()) + " labels but " + std::to_string(frames) +
                        " frame files",
                    DataErrorKind::kMismatch);
  }
  for (std::size_t t = 0; t < frames; ++t) {
    seq.frames.push_back(read_points(dir / "frames" / frame_file_name(t)));
  }
  return seq;
}

}  // namespace mdtrack
