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

#ifndef MDTRACK_SEQUENCE_IO_H_
#define MDTRACK_SEQUENCE_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mdtrack/geometry.h"
#include "mdtrack/point_cloud.h"
#include "mdtrack/scene.h"

namespace mdtrack {

// Ordered key/value pairs, as read from or echoed to a config file.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

struct SequenceMeta {
  std::uint64_t seed = 0;
  KeyValues config;
};

// Layout:
//   frames/NNNNNN.bin  little-endian float32 x, y, z triples, tightly packed
//   labels.jsonl       {"frame": i, "center": [x,y,z], "size": [w,h,l], "yaw": t}
//   meta.json          {"seed": s, "config": {key: value, ...}}
// Point coordinates are stored as float32; they round-trip exactly when the
// in-memory values are already float32-representable.
void write_sequence(const LabeledSequence& seq, const SequenceMeta& meta,
                    const std::filesystem::path& dir);
LabeledSequence read_sequence(const std::filesystem::path& dir,
                              SequenceMeta* meta = nullptr);

// Single frame in the binary point format.
void write_points(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_points(const std::filesystem::path& path);

// One JSON object per box, in the labels.jsonl schema. `flags`, when given,
// adds a boolean "coasted" field per line.
void write_boxes_jsonl(const std::vector<Box3D>& boxes, const std::filesystem::path& path,
                       const std::vector<bool>* flags = nullptr);
std::vector<Box3D> read_boxes_jsonl(const std::filesystem::path& path);

std::string frame_file_name(std::size_t index);

}  // namespace mdtrack

#endif  // MDTRACK_SEQUENCE_IO_H_
