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

#include "mdtrack/config.h"
#include "mdtrack/errors.h"

namespace mdtrack {
namespace {

std::string value_of(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return v;
  }
  ADD_FAILURE() << "missing key " << key;
  return {};
}

TEST(KeyValueText, ParsesCommentsAndWhitespace) {
  const KeyValues kv = parse_key_values("# header\n\n lr = 0.5  # trailing\nimm=false\r\n", "x");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"lr", "0.5"}));
  EXPECT_EQ(kv[1], (std::pair<std::string, std::string>{"imm", "false"}));
}

TEST(KeyValueText, RejectsMalformedLines) {
  EXPECT_THROW(parse_key_values("lr 0.5\n", "x"), ConfigError);
  EXPECT_THROW(parse_key_values("= 3\n", "x"), ConfigError);
  EXPECT_THROW(parse_key_values("lr = 1\nlr = 2\n", "x"), ConfigError);
  try {
    parse_key_values("a = 1\nbroken\n", "cfg.txt");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.txt:2"), std::string::npos);
  }
}

TEST(RunConfigKeys, UnknownKeyIsNamed) {
  try {
    make_run_config({{"lr", "1e-3"}, {"no_such_key", "1"}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("no_such_key"), std::string::npos);
  }
}

TEST(RunConfigKeys, BadValuesAreRejected) {
  EXPECT_THROW(make_run_config({{"lr", "fast"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"lr", "nan"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"batch", "-1"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"batch", "0"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"imm", "maybe"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"head_widths", "1,2"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"crop", "truck"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"preset", "huge"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"scene.frames", "1"}}), ConfigError);
  EXPECT_THROW(make_run_config({{"gradcheck_stencil", "3"}}), ConfigError);
}

TEST(RunConfigKeys, PresetIsAppliedBeforeOtherKeys) {
  const RunConfig c = make_run_config({{"mlp_width", "48"}, {"preset", "tiny"}});
  EXPECT_EQ(c.model.mlp_width, 48u);
  EXPECT_EQ(c.model.channels, 4u);
  EXPECT_EQ(c.model.grid(), 16u);
}

TEST(RunConfigKeys, AblationTogglesAndSeed) {
  const RunConfig c = make_run_config(
      {{"imm", "false"}, {"dwc", "off"}, {"linear", "0"}, {"shared", "no"}, {"seed", "9"}});
  EXPECT_FALSE(c.model.toggles.imm);
  EXPECT_FALSE(c.model.toggles.dwc);
  EXPECT_FALSE(c.model.toggles.linear);
  EXPECT_FALSE(c.model.toggles.shared);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.scene.seed, 9u);
  EXPECT_EQ(c.train.seed, 9u);
}

TEST(RunConfigKeys, GridAndCropAreIndependent) {
  const RunConfig c = make_run_config({{"grid", "64"}, {"crop", "pedestrian"}});
  EXPECT_EQ(c.model.crop.grid_h, 64u);
  EXPECT_EQ(c.model.crop.x_range, CropSpec::pedestrian().x_range);
}

TEST(RunConfigKeys, FullScaleDownsamplePresetsFailValidation) {
  EXPECT_THROW(make_run_config({{"preset", "full-2x"}}), ConfigError);
  EXPECT_NO_THROW(make_run_config({{"preset", "full-8x"}}));
  EXPECT_NO_THROW(make_run_config({{"preset", "full"}}));
}

TEST(ConfigEcho, CoversEverySchemaKey) {
  const KeyValues schema = config_schema();
  const KeyValues echo = echo_config(RunConfig{});
  ASSERT_EQ(schema.size(), echo.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    EXPECT_EQ(schema[i].first, echo[i].first);
    EXPECT_FALSE(schema[i].second.empty()) << schema[i].first;
  }
}

TEST(ConfigEcho, RoundTripsExactly) {
  const RunConfig c = make_run_config({{"preset", "tiny"},
                                       {"lr", "0.1"},
                                       {"alpha_init", "0.3333333333333333"},
                                       {"scene.speed", "0.1,0.7"},
                                       {"scene.segment", "2,5"},
                                       {"head_widths", "8,16,32"},
                                       {"reference_jitter", "0.25"},
                                       {"out_dir", "somewhere"}});
  const KeyValues echo = echo_config(c);
  const RunConfig again = make_run_config(echo);
  EXPECT_EQ(echo_config(again), echo);
  EXPECT_EQ(again.train.lr, 0.1);
  EXPECT_EQ(again.model.alpha_init, 0.3333333333333333);
  EXPECT_EQ(value_of(echo, "scene.segment"), "2,5");
  EXPECT_EQ(value_of(echo, "preset"), "tiny");
}

TEST(ConfigEcho, SurvivesAFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "mdtrack_config_echo.txt";
  const KeyValues echo = echo_config(make_run_config({{"imm", "false"}, {"batch", "3"}}));
  {
    std::ofstream f(path);
    f << "# echo\n" << format_key_values(echo);
  }
  EXPECT_EQ(read_key_values(path), echo);
  std::filesystem::remove(path);
  EXPECT_THROW(read_key_values(path), ConfigError);
}

}  // namespace
}  // namespace mdtrack
