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

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdtrack/attention_bench.h"
#include "mdtrack/config.h"
#include "mdtrack/errors.h"
#include "mdtrack/metrics.h"
#include "mdtrack/model.h"
#include "mdtrack/scene.h"
#include "mdtrack/sequence_io.h"
#include "mdtrack/tracker.h"
#include "mdtrack/trainer.h"

namespace mdtrack::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_file;
  std::vector<std::string> sets;
  std::string preset;
  std::string out_dir;
  bool no_imm = false;
  bool no_dwc = false;
  bool no_linear = false;
  bool unshared = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_file, "key = value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", o.sets, "override one config key (key=value); repeatable");
  cmd->add_option("--preset", o.preset, "model preset: desk, tiny, full, full-Nx");
  cmd->add_option("--out-dir", o.out_dir, "parent directory of the run directory");
  cmd->add_flag("--no-imm", o.no_imm, "disable the motion-difference gate");
  cmd->add_flag("--no-dwc", o.no_dwc, "drop the depthwise conv of the pre-processing path");
  cmd->add_flag("--no-linear", o.no_linear, "drop the linear layer of the pre-processing path");
  cmd->add_flag("--unshared", o.unshared, "separate CNN/DWC/linear weights per frame");
}

void put(KeyValues& kv, const std::string& key, const std::string& value) {
  for (auto& [k, v] : kv) {
    if (k == key) {
      v = value;
      return;
    }
  }
  kv.emplace_back(key, value);
}

RunConfig build_config(const CommonOptions& o) {
  KeyValues kv;
  if (!o.config_file.empty()) kv = read_key_values(o.config_file);
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got '" + s + "'");
    }
    put(kv, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.preset.empty()) put(kv, "preset", o.preset);
  if (!o.out_dir.empty()) put(kv, "out_dir", o.out_dir);
  if (o.no_imm) put(kv, "imm", "false");
  if (o.no_dwc) put(kv, "dwc", "false");
  if (o.no_linear) put(kv, "linear", "false");
  if (o.unshared) put(kv, "shared", "false");
  return make_run_config(kv);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError(path.string(), 0, "cannot write", DataErrorKind::kMissing);
  f << text;
}

void write_config_echo(const fs::path& dir, const RunConfig& config, const std::string& command) {
  write_text(dir / "config.txt",
             "# mdtrack " + command + "\n" + format_key_values(echo_config(config)));
}

fs::path make_run_dir(const RunConfig& config, const std::string& command) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &tm);
  const fs::path base = fs::path(config.out_dir) / (command + "-" + stamp);
  fs::path dir = base;
  for (int n = 2; fs::exists(dir); ++n) dir = base.string() + "-" + std::to_string(n);
  fs::create_directories(dir);
  write_config_echo(dir, config, command);
  return dir;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

KeyValues scene_echo(const RunConfig& config) {
  KeyValues out;
  for (const auto& [k, v] : echo_config(config)) {
    if (k.starts_with("scene.")) out.emplace_back(k, v);
  }
  return out;
}

std::vector<fs::path> sequence_dirs(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw DataError(root.string(), 0, "not a directory", DataErrorKind::kMissing);
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw DataError(root.string(), 0, "no sequence directories", DataErrorKind::kMissing);
  return dirs;
}

std::string sequence_name(const fs::path& dir) {
  fs::path p = dir;
  if (!p.has_filename()) p = p.parent_path();
  return p.filename().string();
}

// ---------------------------------------------------------------- gen

int cmd_gen(const RunConfig& config, std::size_t count, std::string dest) {
  fs::path dir = dest.empty() ? make_run_dir(config, "gen") : fs::path(dest);
  if (!dest.empty()) {
    fs::create_directories(dir);
    write_config_echo(dir, config, "gen");
  }
  Rng seeds(config.scene.seed);
  for (std::size_t i = 0; i < count; ++i) {
    SceneConfig sc = config.scene;
    sc.seed = seeds.next();
    char name[32];
    std::snprintf(name, sizeof(name), "seq_%04zu", i);
    write_sequence(generate(sc), SequenceMeta{sc.seed, scene_echo(config)}, dir / name);
  }
  std::cout << "wrote " << count << " sequences to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

int cmd_train(const RunConfig& config, const std::string& data_dir) {
  std::vector<LabeledSequence> sequences;
  if (data_dir.empty()) {
    sequences = generate_set(config.scene, config.train_sequences);
  } else {
    for (const fs::path& d : sequence_dirs(data_dir)) sequences.push_back(read_sequence(d));
  }
  const std::vector<FramePair> pairs = make_pairs(sequences);
  if (pairs.empty()) throw DataError(data_dir, 0, "no training pairs", DataErrorKind::kMissing);

  const fs::path dir = make_run_dir(config, "train");
  TrackerModel model(config.model, config.seed);
  model.params().save(dir / "init.ckpt");
  const double initial = dataset_loss(model, pairs);

  std::ofstream log(dir / "train_log.csv");
  log << "epoch,lr,loss_mean,steps";
  for (std::size_t s = 0; s < model.alphas().size(); ++s) log << ",alpha" << s;
  log << "\n";
  std::cout << "pairs " << pairs.size() << ", initial loss " << initial << "\n";
  train(model, pairs, config.train, [&](const EpochStats& e) {
    log << e.epoch << "," << fmt(e.lr) << "," << fmt(e.loss_mean) << "," << e.steps;
    std::cout << "epoch " << e.epoch << " lr " << e.lr << " loss " << e.loss_mean << " steps "
              << e.steps;
    for (std::size_t s = 0; s < e.alphas.size(); ++s) {
      log << "," << fmt(e.alphas[s]);
      std::cout << " alpha" << s << " " << e.alphas[s];
    }
    log << "\n";
    log.flush();
    std::cout << "\n";
  });
  model.params().save(dir / "model.ckpt");
  const double final_loss = dataset_loss(model, pairs);

  std::ostringstream summary;
  summary << "metric,value\ninitial_loss," << fmt(initial) << "\nfinal_loss," << fmt(final_loss)
          << "\nloss_ratio," << fmt(final_loss / initial) << "\n";
  std::cout << "final loss " << final_loss << " (ratio " << final_loss / initial << ")\n";
  if (config.val_sequences > 0) {
    SceneConfig vc = config.scene;
    vc.seed = config.val_seed;
    vc.frames = config.val_frames;
    const auto val = generate_set(vc, config.val_sequences);
    const OpeResult m = evaluate_tracking(model, val);
    const OpeResult c = evaluate_coasting(val);
    summary << "val_success," << fmt(m.success_auc) << "\nval_precision," << fmt(m.precision_auc)
            << "\ncoast_success," << fmt(c.success_auc) << "\ncoast_precision,"
            << fmt(c.precision_auc) << "\n";
    std::cout << "held-out success " << m.success_auc << " precision " << m.precision_auc
              << " (coasting " << c.success_auc << " / " << c.precision_auc << ")\n";
  }
  write_text(dir / "summary.csv", summary.str());
  std::cout << "run " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- track

int cmd_track(const RunConfig& config, const std::string& checkpoint, bool oracle,
              const std::vector<std::string>& inputs) {
  if (checkpoint.empty() && !oracle) throw ConfigError("track needs --checkpoint or --oracle");
  std::unique_ptr<TrackerModel> model;
  if (!oracle) {
    model = std::make_unique<TrackerModel>(config.model, ParamStore::load(checkpoint));
  }
  std::vector<std::pair<std::string, LabeledSequence>> sequences;
  for (const std::string& in : inputs) {
    sequences.emplace_back(sequence_name(in), read_sequence(in));
  }
  const fs::path dir = make_run_dir(config, "track");
  for (const auto& [name, seq] : sequences) {
    Tracklet tr;
    tr.sequence_id = name;
    if (oracle) {
      tr.boxes = seq.gt;
      tr.coasted.assign(seq.size(), false);
    } else {
      tr = track_sequence(seq.frames, seq.gt.at(0), *model);
      tr.sequence_id = name;
    }
    write_tracklet_text(tr, dir / (name + ".txt"));
    write_tracklet_jsonl(tr, dir / (name + ".jsonl"));
    std::cout << name << ": " << tr.boxes.size() << " frames, "
              << std::count(tr.coasted.begin(), tr.coasted.end(), true) << " coasted\n";
  }
  std::cout << "run " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

int cmd_eval(const RunConfig& config, const std::string& tracks,
             const std::vector<std::string>& inputs) {
  std::vector<OpeResult> parts;
  std::ostringstream csv;
  csv << "sequence,frame,iou,center_distance,success_auc,precision_auc\n";
  for (const std::string& in : inputs) {
    const std::string name = sequence_name(in);
    const auto gt = read_boxes_jsonl(fs::path(in) / "labels.jsonl");
    const fs::path pred_path = fs::path(tracks) / (name + ".jsonl");
    const auto pred = read_boxes_jsonl(pred_path);
    if (pred.size() != gt.size()) {
      throw DataError(pred_path.string(), 0,
                      std::to_string(pred.size()) + " boxes for " + std::to_string(gt.size()) +
                          " labeled frames",
                      DataErrorKind::kMismatch);
    }
    const OpeResult r = ope(pred, gt);
    for (std::size_t i = 0; i < r.ious.size(); ++i) {
      csv << name << "," << i + 1 << "," << fmt(r.ious[i]) << "," << fmt(r.distances[i])
          << ",,\n";
    }
    parts.push_back(r);
  }
  const OpeResult all = summarize_ope(parts);
  csv << "summary,," << ",," << fmt(all.success_auc) << "," << fmt(all.precision_auc) << "\n";
  const fs::path dir = make_run_dir(config, "eval");
  write_text(dir / "eval.csv", csv.str());
  std::cout << "success " << all.success_auc << " precision " << all.precision_auc << " over "
            << all.ious.size() << " frames\nrun " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench

int cmd_bench(const RunConfig& config, const std::vector<std::size_t>& ns, std::size_t d,
              std::size_t repeats) {
  const auto records = bench_attention(ns, d, repeats, config.seed);
  const fs::path dir = make_run_dir(config, "bench");
  std::ostringstream csv;
  write_bench_csv(records, csv);
  write_text(dir / "bench.csv", csv.str());
  const std::string report = scaling_report(records);
  write_text(dir / "scaling.txt", report);
  std::cout << report << "run " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- gradcheck

int cmd_gradcheck(const RunConfig& config, double tolerance) {
  TrackerModel model(config.model, config.seed);
  GradcheckOptions opts;
  opts.max_entries = config.gradcheck_entries;
  opts.seed = config.seed;
  opts.eps = config.gradcheck_eps;
  opts.stencil = config.gradcheck_stencil;
  const auto reports = model_gradcheck(model, config.scene, opts);
  const fs::path dir = make_run_dir(config, "gradcheck");

  std::ostringstream csv;
  csv << "parameter,checked,max_rel_error,analytic,numeric\n";
  std::map<std::string, double> groups;
  for (const auto& r : reports) {
    csv << r.name << "," << r.checked << "," << fmt(r.max_rel_error) << "," << fmt(r.analytic)
        << "," << fmt(r.numeric) << "\n";
    const std::string group = r.name.substr(0, r.name.find('.'));
    groups[group] = std::max(groups[group], r.max_rel_error);
  }
  write_text(dir / "gradcheck.csv", csv.str());
  bool ok = true;
  std::printf("%-12s %s\n", "group", "max rel. error");
  for (const auto& [group, err] : groups) {
    std::printf("%-12s %.3e %s\n", group.c_str(), err, err < tolerance ? "ok" : "FAIL");
    ok = ok && err < tolerance;
  }
  std::cout << "run " << dir.string() << "\n";
  return ok ? kExitOk : kExitNumeric;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"mdtrack: motion-centric LiDAR single-object tracking"};
  app.require_subcommand(0, 1);
  bool schema = false;
  app.add_flag("--schema", schema, "print every config key with its meaning");

  CommonOptions common;
  std::size_t count = 1;
  std::string dest, data_dir, checkpoint, tracks;
  bool oracle = false;
  std::vector<std::string> inputs;
  std::vector<std::size_t> ns{256, 512, 1024, 2048};
  std::size_t d = 16, repeats = 3;
  double tolerance = 1e-4;
  std::size_t entries = 0;
  bool all_entries = false;

  CLI::App* gen = app.add_subcommand("gen", "generate labeled synthetic sequences");
  add_common(gen, common);
  gen->add_option("-n,--count", count, "number of sequences")->check(CLI::PositiveNumber);
  gen->add_option("--dest", dest, "output directory (default: a new run directory)");

  CLI::App* tr = app.add_subcommand("train", "train a tracker; writes checkpoints and logs");
  add_common(tr, common);
  tr->add_option("--data", data_dir, "directory of sequence directories (default: generate)");

  CLI::App* track = app.add_subcommand("track", "track sequences with a checkpoint");
  add_common(track, common);
  track->add_option("--checkpoint", checkpoint, "model checkpoint")->check(CLI::ExistingFile);
  track->add_flag("--oracle", oracle, "emit the ground-truth boxes (pipeline check)");
  track->add_option("sequences", inputs, "sequence directories")->required();

  CLI::App* ev = app.add_subcommand("eval", "OPE success/precision of tracklets");
  add_common(ev, common);
  ev->add_option("--tracks", tracks, "directory of <sequence>.jsonl tracklets")->required();
  ev->add_option("sequences", inputs, "labeled sequence directories")->required();

  CLI::App* bench = app.add_subcommand("bench", "attention op counts and timings vs N");
  add_common(bench, common);
  bench->add_option("--n", ns, "token counts (>= 4, increasing)")->delimiter(',');
  bench->add_option("--d", d, "head width")->check(CLI::PositiveNumber);
  bench->add_option("--repeats", repeats, "timing repeats (best is kept)")
      ->check(CLI::PositiveNumber);

  CLI::App* gc = app.add_subcommand("gradcheck", "finite-difference check of the full model");
  add_common(gc, common);
  gc->add_option("--tol", tolerance, "max relative error");
  CLI::Option* entries_opt =
      gc->add_option("--entries", entries, "entries per parameter tensor (0 = all)");
  gc->add_flag("--all", all_entries, "check every entry");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (schema) {
      for (const auto& [k, doc] : config_schema()) std::cout << k << "\t" << doc << "\n";
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitUsage;
    }
    RunConfig config = build_config(common);
    if (*gen) return cmd_gen(config, count, dest);
    if (*tr) return cmd_train(config, data_dir);
    if (*track) return cmd_track(config, checkpoint, oracle, inputs);
    if (*ev) return cmd_eval(config, tracks, inputs);
    if (*bench) return cmd_bench(config, ns, d, repeats);
    if (*gc) {
      if (all_entries) {
        config.gradcheck_entries = 0;
      } else if (entries_opt->count() > 0) {
        config.gradcheck_entries = entries;
      }
      return cmd_gradcheck(config, tolerance);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ShapeError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace mdtrack::cli
