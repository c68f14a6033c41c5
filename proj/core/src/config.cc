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

#include "mdtrack/config.h"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <vector>

#include "mdtrack/errors.h"

namespace mdtrack {
namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw ConfigError("bad value '" + value + "' for key '" + key + "': expected " + expected);
}

double parse_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) {
    bad_value(key, v, "a finite number");
  }
  return d;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  if (v.empty() || v[0] == '-' || v[0] == '+') bad_value(key, v, "a non-negative integer");
  const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
  if (*end != '\0' || errno == ERANGE) bad_value(key, v, "a non-negative integer");
  return n;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(parse_u64(key, v));
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, v, "true or false");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = v.find(sep, start);
    parts.push_back(v.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::array<double, 2> parse_range(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 2) bad_value(key, v, "two comma-separated numbers");
  return {parse_double(key, parts[0]), parse_double(key, parts[1])};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string num(std::uint64_t v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "true" : "false"; }
std::string range(const std::array<double, 2>& r) { return num(r[0]) + "," + num(r[1]); }

std::string crop_name(const CropSpec& c) {
  if (c.x_range == CropSpec::pedestrian().x_range) return "pedestrian";
  return "car";
}

ModelConfig preset_model(const std::string& name) {
  if (name == "desk") return ModelConfig::desk();
  if (name == "tiny") return ModelConfig::tiny();
  if (name == "full") return ModelConfig::full_scale();
  for (const char* r : {"2", "4", "8", "16"}) {
    if (name == std::string("full-") + r + "x") return ModelConfig::downsample_preset(std::atoi(r));
  }
  throw ConfigError("unknown preset '" + name + "' (desk, tiny, full, full-2x .. full-16x)");
}

struct Entry {
  const char* key;
  const char* doc;
  std::function<void(RunConfig&, const std::string& key, const std::string& v)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define MDT_DOUBLE(KEY, DOC, FIELD)                                                     \
  Entry {                                                                               \
    KEY, DOC, [](RunConfig& c, const std::string& k, const std::string& v) {            \
      c.FIELD = parse_double(k, v);                                                     \
    },                                                                                  \
        [](const RunConfig& c) { return num(c.FIELD); }                                 \
  }
#define MDT_SIZE(KEY, DOC, FIELD)                                                       \
  Entry {                                                                               \
    KEY, DOC, [](RunConfig& c, const std::string& k, const std::string& v) {            \
      c.FIELD = parse_size(k, v);                                                       \
    },                                                                                  \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }                      \
  }
#define MDT_BOOL(KEY, DOC, FIELD)                                                       \
  Entry {                                                                               \
    KEY, DOC, [](RunConfig& c, const std::string& k, const std::string& v) {            \
      c.FIELD = parse_bool(k, v);                                                       \
    },                                                                                  \
        [](const RunConfig& c) { return flag(c.FIELD); }                                \
  }
#define MDT_RANGE(KEY, DOC, FIELD)                                                      \
  Entry {                                                                               \
    KEY, DOC, [](RunConfig& c, const std::string& k, const std::string& v) {            \
      c.FIELD = parse_range(k, v);                                                      \
    },                                                                                  \
        [](const RunConfig& c) { return range(c.FIELD); }                               \
  }

const std::vector<Entry>& schema() {
  static const std::vector<Entry> entries{
      {"preset", "model preset applied before other keys: desk, tiny, full, full-Nx",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.model = preset_model(v);
         c.preset = v;
       },
       [](const RunConfig& c) { return c.preset; }},
      {"grid", "BEV grid cells per side (power of two >= 8)",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.model.crop.grid_h = c.model.crop.grid_w = parse_size(k, v);
       },
       [](const RunConfig& c) { return std::to_string(c.model.crop.grid_h); }},
      {"crop", "fixed crop window: car (+-4.8 m) or pedestrian (+-1.92 m)",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         CropSpec s;
         if (v == "car") {
           s = CropSpec::car(c.model.crop.grid_h);
         } else if (v == "pedestrian") {
           s = CropSpec::pedestrian(c.model.crop.grid_h);
         } else {
           bad_value(k, v, "car or pedestrian");
         }
         c.model.crop = s;
       },
       [](const RunConfig& c) { return crop_name(c.model.crop); }},
      MDT_DOUBLE("crop_ratio", "0 = fixed window; >0 = window of ratio x box footprint",
                 model.crop_ratio),
      MDT_SIZE("channels", "pillar feature width C", model.channels),
      MDT_SIZE("heads", "attention heads per block", model.heads),
      MDT_SIZE("stages", "backbone blocks (each halves the grid)", model.stages),
      {"head_widths", "channels of the three head conv blocks, comma-separated",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto parts = split(v, ',');
         if (parts.size() != 3) bad_value(k, v, "three comma-separated integers");
         for (std::size_t i = 0; i < 3; ++i) c.model.head_widths[i] = parse_size(k, parts[i]);
       },
       [](const RunConfig& c) {
         return std::to_string(c.model.head_widths[0]) + "," +
                std::to_string(c.model.head_widths[1]) + "," +
                std::to_string(c.model.head_widths[2]);
       }},
      MDT_SIZE("mlp_width", "head MLP trunk width", model.mlp_width),
      MDT_SIZE("ffn_expansion", "block FFN expansion factor", model.ffn_expansion),
      MDT_DOUBLE("alpha_init", "initial alpha of every block", model.alpha_init),
      MDT_BOOL("imm", "motion-difference gate", model.toggles.imm),
      MDT_BOOL("dwc", "depthwise conv in the pre-processing path", model.toggles.dwc),
      MDT_BOOL("linear", "shared linear layer in the pre-processing path",
               model.toggles.linear),
      MDT_BOOL("shared", "share CNN/DWC/linear weights across frames", model.toggles.shared),
      MDT_DOUBLE("lambda1", "loss weight of (dx, dy)", model.loss.xy),
      MDT_DOUBLE("lambda2", "loss weight of dz", model.loss.z),
      MDT_DOUBLE("lambda3", "loss weight of dtheta", model.loss.theta),
      MDT_DOUBLE("huber_delta", "Huber transition point", model.loss.huber_delta),
      MDT_DOUBLE("lr", "base learning rate", train.lr),
      MDT_DOUBLE("weight_decay", "AdamW decoupled weight decay", train.weight_decay),
      MDT_SIZE("batch", "pairs per optimizer step", train.batch),
      MDT_SIZE("epochs", "maximum epochs", train.epochs),
      MDT_SIZE("max_steps", "maximum optimizer steps (0 = unlimited)", train.max_steps),
      MDT_DOUBLE("decay_factor", "learning-rate divisor per decay interval",
                 train.decay_factor),
      MDT_SIZE("decay_interval", "epochs per learning-rate decay", train.decay_interval),
      MDT_BOOL("augment", "flip/rotate augmentation during training", train.augment),
      MDT_DOUBLE("flip_probability", "probability of the mirror augmentation",
                 train.augment_options.flip_probability),
      MDT_DOUBLE("max_rotation_deg", "yaw augmentation half-range in degrees",
                 train.augment_options.max_rotation_deg),
      MDT_DOUBLE("reference_jitter", "uniform crop-center offset in meters",
                 train.augment_options.reference_jitter),
      {"seed", "model init, training draws and training scenes",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.seed = c.scene.seed = c.train.seed = parse_u64(k, v);
       },
       [](const RunConfig& c) { return num(c.seed); }},
      {"val_seed", "held-out scene seed",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.val_seed = parse_u64(k, v);
       },
       [](const RunConfig& c) { return num(c.val_seed); }},
      MDT_SIZE("train_sequences", "generated training sequences", train_sequences),
      MDT_SIZE("val_sequences", "generated held-out sequences", val_sequences),
      MDT_SIZE("val_frames", "frames per held-out sequence", val_frames),
      MDT_SIZE("gradcheck_entries", "entries checked per parameter tensor (0 = all)",
               gradcheck_entries),
      {"gradcheck_stencil", "central-difference points of the model check: 2 or 4",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::size_t n = parse_size(k, v);
         if (n != 2 && n != 4) bad_value(k, v, "2 or 4");
         c.gradcheck_stencil = static_cast<int>(n);
       },
       [](const RunConfig& c) { return std::to_string(c.gradcheck_stencil); }},
      MDT_DOUBLE("gradcheck_eps", "central-difference step of the model check", gradcheck_eps),
      {"out_dir", "parent directory of timestamped run directories",
       [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; },
       [](const RunConfig& c) { return c.out_dir; }},
      MDT_SIZE("scene.frames", "frames per training sequence", scene.frames),
      MDT_RANGE("scene.length", "target length range (m)", scene.length),
      MDT_RANGE("scene.width", "target width range (m)", scene.width),
      MDT_RANGE("scene.height", "target height range (m)", scene.height),
      MDT_RANGE("scene.speed", "speed range (m/frame)", scene.speed),
      MDT_DOUBLE("scene.yaw_rate", "max |yaw rate| (rad/frame)", scene.yaw_rate),
      {"scene.segment", "frames per constant-velocity segment, min,max",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto parts = split(v, ',');
         if (parts.size() != 2) bad_value(k, v, "two comma-separated integers");
         c.scene.segment = {parse_size(k, parts[0]), parse_size(k, parts[1])};
       },
       [](const RunConfig& c) {
         return std::to_string(c.scene.segment[0]) + "," + std::to_string(c.scene.segment[1]);
       }},
      MDT_DOUBLE("scene.static_probability", "probability of a static target",
                 scene.static_probability),
      MDT_RANGE("scene.start_range", "initial sensor-to-target distance (m)",
                scene.start_range),
      MDT_DOUBLE("scene.ground_z", "ground height (m)", scene.ground_z),
      MDT_DOUBLE("scene.face_density", "target points per m^2 at the reference range",
                 scene.face_density),
      MDT_DOUBLE("scene.reference_range", "range of the nominal density (m)",
                 scene.reference_range),
      MDT_DOUBLE("scene.noise", "uniform per-axis point noise half-width (m)", scene.noise),
      MDT_DOUBLE("scene.clutter_density", "static clutter points per m^2",
                 scene.clutter_density),
      MDT_DOUBLE("scene.clutter_extent", "side of the clutter square (m)",
                 scene.clutter_extent),
      MDT_DOUBLE("scene.clutter_height", "clutter height above ground (m)",
                 scene.clutter_height),
      MDT_DOUBLE("scene.clutter_margin", "clutter-free margin around the target path (m)",
                 scene.clutter_margin),
      MDT_DOUBLE("scene.dropout", "per-point target dropout probability", scene.dropout),
  };
  return entries;
}

#undef MDT_DOUBLE
#undef MDT_SIZE
#undef MDT_BOOL
#undef MDT_RANGE

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

KeyValues parse_key_values(std::string_view text, const std::string& source) {
  KeyValues kv;
  std::set<std::string> seen;
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(std::string_view(content).substr(0, eq));
    std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    kv.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  const std::string text{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
  return parse_key_values(text, path.string());
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const Entry& e : schema()) {
    if (key == e.key) {
      e.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

RunConfig make_run_config(const KeyValues& kv) {
  RunConfig config;
  for (const auto& [k, v] : kv) {
    if (k == "preset") set_config_value(config, k, v);
  }
  for (const auto& [k, v] : kv) {
    if (k != "preset") set_config_value(config, k, v);
  }
  config.model.validate();
  config.scene.validate();
  if (config.train.batch == 0) throw ConfigError("batch must be positive");
  if (!(config.train.decay_factor > 0.0)) throw ConfigError("decay_factor must be positive");
  if (!(config.gradcheck_eps > 0.0)) throw ConfigError("gradcheck_eps must be positive");
  if (config.train.decay_interval == 0) throw ConfigError("decay_interval must be positive");
  return config;
}

KeyValues echo_config(const RunConfig& config) {
  KeyValues kv;
  for (const Entry& e : schema()) kv.emplace_back(e.key, e.get(config));
  return kv;
}

KeyValues config_schema() {
  KeyValues kv;
  for (const Entry& e : schema()) kv.emplace_back(e.key, e.doc);
  return kv;
}

}  // namespace mdtrack
