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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mdtrack/errors.h"
#include "mdtrack/scene.h"
#include "mdtrack/sequence_io.h"

namespace mdtrack {
namespace {

namespace fs = std::filesystem;

class SequenceIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mdtrack_io_" + std::string(
                                ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    SceneConfig c;
    c.frames = 4;
    c.seed = 17;
    seq_ = generate(c);
    write_sequence(seq_, {17, {{"scene.frames", "4"}}}, dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void overwrite(const fs::path& p, const std::string& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << bytes;
  }

  fs::path dir_;
  LabeledSequence seq_;
};

TEST_F(SequenceIo, LayoutUsesZeroPaddedFrameNames) {
  EXPECT_EQ(frame_file_name(7), "000007.bin");
  EXPECT_TRUE(fs::exists(dir_ / "frames" / "000003.bin"));
  EXPECT_TRUE(fs::exists(dir_ / "labels.jsonl"));
  EXPECT_TRUE(fs::exists(dir_ / "meta.json"));
  EXPECT_EQ(fs::file_size(dir_ / "frames" / "000000.bin"), 12 * seq_.frames[0].size());
}

TEST_F(SequenceIo, RoundTripIsExact) {
  SequenceMeta meta;
  const LabeledSequence back = read_sequence(dir_, &meta);
  EXPECT_EQ(back.frames, seq_.frames);
  EXPECT_EQ(back.gt, seq_.gt);
  EXPECT_EQ(meta.seed, 17u);
  ASSERT_EQ(meta.config.size(), 1u);
  EXPECT_EQ(meta.config[0].second, "4");
}

TEST_F(SequenceIo, EmptyFrameParsesToEmptyCloud) {
  overwrite(dir_ / "frames" / "000001.bin", "");
  EXPECT_TRUE(read_sequence(dir_).frames[1].empty());
}

TEST_F(SequenceIo, TruncatedPointFileReportsLastFullRecord) {
  const fs::path p = dir_ / "frames" / "000002.bin";
  fs::resize_file(p, 12 * 5 + 7);
  try {
    read_sequence(dir_);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.kind(), DataErrorKind::kTruncated);
    EXPECT_EQ(e.offset(), 60u);
    EXPECT_NE(e.file().find("000002.bin"), std::string::npos);
  }
}

TEST_F(SequenceIo, MalformedHeaderIsItsOwnError) {
  overwrite(dir_ / "meta.json", "{\"seed\": 3,, }");
  try {
    read_sequence(dir_);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.kind(), DataErrorKind::kMalformed);
    EXPECT_NE(e.file().find("meta.json"), std::string::npos);
    EXPECT_GT(e.offset(), 0u);
  }
}

TEST_F(SequenceIo, LabelFrameCountMismatch) {
  fs::remove(dir_ / "frames" / "000003.bin");
  try {
    read_sequence(dir_);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.kind(), DataErrorKind::kMismatch);
    EXPECT_NE(e.file().find("labels.jsonl"), std::string::npos);
  }
}

TEST_F(SequenceIo, MissingDirectoryIsMissing) {
  try {
    read_sequence(dir_ / "nope");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(e.kind(), DataErrorKind::kMissing);
  }
}

TEST_F(SequenceIo, BadLabelLinesAreRejectedWithOffset) {
  const fs::path p = dir_ / "labels.jsonl";
  const std::string first = "{\"frame\":0,\"center\":[0,0,0],\"size\":[1,1,1],\"yaw\":0}\n";
  overwrite(p, first + "{\"frame\":1,\"center\":[0,0,0],\"size\":[1,-1,1],\"yaw\":0}\n");
  try {
    read_boxes_jsonl(p);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_EQ(first.size(), 52u);
    EXPECT_EQ(e.offset(), first.size());
  }
  overwrite(p, "{\"frame\":1,\"center\":[0,0,0],\"size\":[1,1,1],\"yaw\":0}\n");
  EXPECT_THROW(read_boxes_jsonl(p), DataError);
  overwrite(p, "not json\n");
  EXPECT_THROW(read_boxes_jsonl(p), DataError);
  overwrite(p, "{\"frame\":0,\"center\":[0,0],\"size\":[1,1,1],\"yaw\":0}\n");
  EXPECT_THROW(read_boxes_jsonl(p), DataError);
}

TEST_F(SequenceIo, CoastedFlagIsWrittenAndIgnoredOnRead) {
  const fs::path p = dir_ / "track.jsonl";
  const std::vector<bool> flags{false, true, false, false};
  write_boxes_jsonl(seq_.gt, p, &flags);
  std::ifstream f(p);
  std::string first, second;
  std::getline(f, first);
  std::getline(f, second);
  EXPECT_NE(first.find("\"coasted\":false"), std::string::npos);
  EXPECT_NE(second.find("\"coasted\":true"), std::string::npos);
  EXPECT_EQ(read_boxes_jsonl(p), seq_.gt);
}

TEST_F(SequenceIo, NonFinitePointIsRejected) {
  const fs::path p = dir_ / "frames" / "000000.bin";
  const std::string nan_record("\x00\x00\xc0\x7f\x00\x00\x00\x00\x00\x00\x00\x00", 12);
  overwrite(p, nan_record);
  EXPECT_THROW(read_points(p), DataError);
}

}  // namespace
}  // namespace mdtrack
