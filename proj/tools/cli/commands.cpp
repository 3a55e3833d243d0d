/* Copyright 2026 The symspot Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "symspot/anchors.hpp"
#include "symspot/error.hpp"
#include "symspot/manifest.hpp"
#include "symspot/metrics.hpp"
#include "symspot/pipeline.hpp"
#include "symspot/random.hpp"
#include "symspot/synthgen.hpp"

namespace symspot::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kConfigEcho = "config.resolved.json";

// Flags shared by every subcommand; they override fields of the config file.
struct CommonFlags {
  std::string config;
  std::string out;
  int stride = 0;
  double alpha = 0.0;
  double overlap_threshold = 0.0;
  int noise_level = 0;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::map<std::string, CLI::Option*> given;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config, "JSON config file");
    given["out"] = cmd->add_option("-o,--out", out, "output directory");
    given["stride"] = cmd->add_option("--stride", stride, "tile stride in pixels");
    given["alpha"] = cmd->add_option("--alpha", alpha, "tile scale factor");
    given["overlap"] = cmd->add_option("--overlap-threshold", overlap_threshold,
                                       "merge overlap as a fraction of the smaller box");
    given["noise"] = cmd->add_option("--noise-level", noise_level, "degradation level 0-3");
    given["seed"] = cmd->add_option("--seed", seed, "random seed");
    given["jobs"] = cmd->add_option("--jobs", jobs, "tiles processed concurrently");
  }

  bool has(const char* name) const { return given.at(name)->count() > 0; }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config.empty() ? PipelineConfig{} : load_config(config);
    if (has("out")) cfg.paths.output = out;
    if (has("stride")) cfg.tiling.stride = stride;
    if (has("alpha")) cfg.tiling.alpha = alpha;
    if (has("overlap")) cfg.merge.overlap_threshold = overlap_threshold;
    if (has("noise")) cfg.synth.noise_level = noise_level;
    if (has("seed")) cfg.seed = seed;
    if (has("jobs")) cfg.jobs = jobs;
    cfg.oracle.seed = cfg.seed;
    cfg.validate();
    return cfg;
  }
};

fs::path output_dir(const PipelineConfig& cfg) {
  if (cfg.paths.output.empty()) throw InvalidInput("no output directory (use --out)");
  fs::path dir(cfg.paths.output);
  fs::create_directories(dir);
  return dir;
}

void echo_config(const fs::path& dir, const PipelineConfig& cfg) {
  write_json(dir / kConfigEcho, config_to_json(cfg));
}

const std::string& require_path(const std::string& p, const char* what) {
  if (p.empty()) throw InvalidInput(std::string("missing path: ") + what);
  return p;
}

std::string stem_of(const std::string& image) { return fs::path(image).stem().string(); }

// ---------------------------------------------------------------------------
// synth

fs::path run_synth(const PipelineConfig& cfg, const fs::path& dir, std::ostream& out) {
  Manifest manifest;
  manifest.classes = symbol_class_names();
  for (int i = 0; i < cfg.synth.count; ++i) {
    PlanSpec spec;
    spec.width = cfg.synth.width;
    spec.height = cfg.synth.height;
    spec.seed = derive_seed(cfg.seed, "plan" + std::to_string(i));
    spec.room_split_depth = cfg.synth.room_split_depth;
    spec.density_min = cfg.synth.density_min;
    spec.density_max = cfg.synth.density_max;
    if (!cfg.synth.class_set.empty()) spec.class_set = cfg.synth.class_set;
    spec.noise_level = cfg.synth.noise_level;
    spec.degrade.flip_probability = cfg.synth.flip_probability;
    const GeneratedPlan plan = generate_plan(spec);

    char name[32];
    std::snprintf(name, sizeof(name), "plan_%04d.pgm", i);
    save_pgm(dir / name, plan.image);
    manifest.images.push_back({name, plan.annotations});
    out << name << ": " << plan.annotations.size() << " symbols\n";
  }
  const fs::path manifest_path = dir / "manifest.json";
  save_manifest(manifest_path, manifest);
  return manifest_path;
}

// ---------------------------------------------------------------------------
// anchors

std::vector<BoxSize> network_sizes(const Manifest& m, double to_network) {
  std::vector<BoxSize> sizes;
  for (const auto& img : m.images) {
    for (const auto& a : img.annotations) {
      if (!a.ignore) sizes.push_back({a.box.w * to_network, a.box.h * to_network});
    }
  }
  return sizes;
}

AnchorSet derive_anchors(const Manifest& m, double to_network, const PipelineConfig& cfg,
                         std::ostream& err) {
  const auto sizes = network_sizes(m, to_network);
  if (sizes.empty()) throw InvalidInput("manifest has no annotations to cluster");
  const std::set<BoxSize> distinct(sizes.begin(), sizes.end());
  int k = cfg.anchor_count;
  if (static_cast<std::size_t>(k) > distinct.size()) {
    k = static_cast<int>(distinct.size());
    err << "warning: only " << k << " distinct symbol sizes; clustering " << k
        << " anchors\n";
  }
  AnchorSet set = cluster_anchors(sizes, k, cfg.seed);
  // Rounded so the config echo carries exactly the anchors that were used.
  for (auto& p : set.priors) {
    p.w = round_significant(p.w);
    p.h = round_significant(p.h);
  }
  return set;
}

// ---------------------------------------------------------------------------
// detect

HeadConfig resolve_head(PipelineConfig& cfg, const Manifest& m, std::ostream& err) {
  HeadConfig head = cfg.head;
  head.net_size = cfg.tiling.net_size;
  head.num_classes = static_cast<int>(m.classes.size());
  if (head.anchors.priors.empty() && !cfg.paths.anchors.empty()) {
    head.anchors = load_anchors(cfg.paths.anchors);
  }
  if (head.anchors.priors.empty()) {
    if (cfg.backend != "oracle") {
      throw InvalidInput("the file backend needs anchors (head.anchors or paths.anchors)");
    }
    head.anchors = derive_anchors(m, cfg.tiling.net_size / double(cfg.tiling.side()), cfg, err);
  }
  cfg.head.anchors = head.anchors;
  head.validate();
  return head;
}

std::map<std::string, std::vector<Annotation>> truth_by_image(const Manifest& m) {
  std::map<std::string, std::vector<Annotation>> truth;
  for (const auto& img : m.images) {
    auto& v = truth[img.path];
    for (const auto& a : img.annotations) {
      if (!a.ignore) v.push_back(a);
    }
  }
  return truth;
}

Json detection_record(const std::string& image, const Detection& d, const Manifest& m) {
  const auto r = [](double v) { return round_significant(v); };
  Json rec;
  rec["image"] = image;
  rec["class_id"] = d.class_id;
  rec["class_name"] = m.classes.at(static_cast<std::size_t>(d.class_id));
  rec["x"] = r(d.box.x);
  rec["y"] = r(d.box.y);
  rec["w"] = r(d.box.w);
  rec["h"] = r(d.box.h);
  rec["score"] = r(d.score);
  return rec;
}

void render(const fs::path& image_path, const std::vector<Detection>& dets,
            const fs::path& dest) {
  GrayImage img = load_image(image_path);
  for (const auto& d : dets) {
    const PixelRect p = snap_to_pixels(d.box, img.width(), img.height());
    draw_into(img, RectOutline{int(p.x0), int(p.y0), int(p.x1 - p.x0), int(p.y1 - p.y0), 2});
  }
  save_pgm(dest, img);
}

struct DetectSummary {
  fs::path detections;
  std::size_t truths = 0;
  std::size_t pre_merge = 0;
  std::size_t post_merge = 0;
  bool every_plan_has_duplicates = true;
  bool counts_match = true;
};

DetectSummary run_detect(PipelineConfig& cfg, const fs::path& dir, bool render_boxes,
                         std::ostream& out, std::ostream& err) {
  const fs::path manifest_path = require_path(cfg.paths.manifest, "manifest (--manifest)");
  const Manifest manifest = load_manifest(manifest_path);

  DetectOptions options;
  options.tiling = cfg.tiling;
  options.head = resolve_head(cfg, manifest, err);
  options.merge = cfg.merge;
  options.score_threshold = cfg.score_threshold;
  options.jobs = cfg.jobs;

  std::unique_ptr<DetectorBackend> backend;
  if (cfg.backend == "oracle") {
    backend = std::make_unique<OracleBackend>(truth_by_image(manifest), options.head, cfg.oracle);
  } else {
    backend = std::make_unique<FileBackend>(
        require_path(cfg.paths.rawpred_dir, "rawpred directory (--rawpred-dir)"), options.head);
  }

  DetectSummary summary;
  Json records = Json::array();
  for (const auto& img : manifest.images) {
    const fs::path image_path = resolve_image(manifest_path, img.path);
    const auto [w, h] = image_size(image_path);
    const PlanDetections result =
        detect_plan(img.path, stem_of(img.path), w, h, *backend, options);
    std::size_t truths = 0;
    for (const auto& a : img.annotations) truths += a.ignore ? 0 : 1;
    summary.truths += truths;
    summary.pre_merge += result.pre_merge;
    summary.post_merge += result.merged.size();
    summary.every_plan_has_duplicates &= result.pre_merge > truths;
    summary.counts_match &= result.merged.size() == truths;
    for (const auto& d : result.merged) records.push_back(detection_record(img.path, d, manifest));
    out << img.path << ": " << result.tiles << " tiles, " << result.pre_merge
        << " tile detections, " << result.merged.size() << " after merge\n";
    if (render_boxes) {
      render(image_path, result.merged, dir / (stem_of(img.path) + "_detections.pgm"));
    }
  }
  summary.detections = dir / "detections.json";
  write_json(summary.detections, records);
  cfg.paths.detections = summary.detections.string();
  return summary;
}

// ---------------------------------------------------------------------------
// eval

EvalReport run_eval(const PipelineConfig& cfg, const fs::path& dir, std::ostream& out) {
  const fs::path manifest_path = require_path(cfg.paths.manifest, "manifest (--manifest)");
  const Manifest manifest = load_manifest(manifest_path);
  const Json records = read_json(require_path(cfg.paths.detections, "detections (--detections)"));

  std::map<std::string, std::size_t> index;
  std::vector<ImageEval> images;
  for (const auto& img : manifest.images) {
    index[img.path] = images.size();
    const auto [w, h] = image_size(resolve_image(manifest_path, img.path));
    images.push_back({{}, img.annotations, w, h});
  }
  try {
    for (const auto& rec : records) {
      const auto image = rec.at("image").get<std::string>();
      const auto it = index.find(image);
      if (it == index.end()) {
        throw FormatError("detection refers to image '" + image + "' absent from the manifest");
      }
      Detection d;
      d.class_id = rec.at("class_id").get<int>();
      d.box = {rec.at("x").get<double>(), rec.at("y").get<double>(), rec.at("w").get<double>(),
               rec.at("h").get<double>()};
      d.score = rec.at("score").get<double>();
      images[it->second].detections.push_back(d);
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed detections file: ") + e.what());
  }

  const EvalReport report = evaluate(images, manifest.classes);
  write_json(dir / "report.json", report_to_json(report));
  const std::string table = report_to_table(report);
  {
    std::ofstream txt(dir / "report.txt", std::ios::binary);
    txt << table;
    if (!txt) throw IoError("write failed: " + (dir / "report.txt").string());
  }
  out << table;
  return report;
}

// ---------------------------------------------------------------------------
// selftest

bool check(std::ostream& out, bool ok, const std::string& what) {
  out << (ok ? "[PASS] " : "[FAIL] ") << what << '\n';
  return ok;
}

// encode -> decode recovers random detection sets.
bool round_trip_check(std::uint64_t seed) {
  HeadConfig head;
  head.grid_h = head.grid_w = 7;
  head.num_classes = 3;
  head.net_size = 227.0;
  head.anchors.priors = {{16, 16}, {40, 24}, {24, 60}, {80, 80}};
  Rng rng(derive_seed(seed, "selftest-roundtrip"));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Detection> dets;
    std::set<Slot> used;
    for (int i = 0; i < 6; ++i) {
      Detection d{int(rng.uniform_int(0, 2)),
                  BBox::from_center(rng.uniform(0, 227), rng.uniform(0, 227),
                                    rng.uniform(8, 120), rng.uniform(8, 120)),
                  rng.uniform(0.3, 0.99)};
      if (used.insert(assign_slot(d.box.center_x(), d.box.center_y(), d.box.w, d.box.h, head))
              .second) {
        dets.push_back(d);
      }
    }
    auto decoded = decode(encode_detections(dets, head), head, 0.2);
    if (decoded.size() != dets.size()) return false;
    std::sort(decoded.begin(), decoded.end(), detection_order);
    std::sort(dets.begin(), dets.end(), detection_order);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const auto& a = dets[i];
      const auto& b = decoded[i];
      const double err = std::max({std::abs(a.box.x - b.box.x), std::abs(a.box.y - b.box.y),
                                   std::abs(a.box.w - b.box.w), std::abs(a.box.h - b.box.h),
                                   std::abs(a.score - b.score)});
      if (a.class_id != b.class_id || err >= 1e-6) return false;
    }
  }
  return true;
}

int run_selftest(PipelineConfig cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir = output_dir(cfg);
  cfg.backend = "oracle";
  cfg.oracle = OracleConfig{};
  cfg.oracle.seed = cfg.seed;

  const fs::path corpus = dir / "corpus";
  const fs::path detect_dir = dir / "detect";
  const fs::path eval_dir = dir / "eval";
  for (const auto& d : {corpus, detect_dir, eval_dir}) fs::create_directories(d);

  cfg.paths.manifest = run_synth(cfg, corpus, out).string();
  const DetectSummary summary = run_detect(cfg, detect_dir, false, out, err);
  const EvalReport report = run_eval(cfg, eval_dir, out);
  echo_config(dir, cfg);

  bool ok = true;
  ok &= check(out, round_trip_check(cfg.seed), "encode/decode round trip");
  ok &= check(out, summary.every_plan_has_duplicates,
              "every plan yields cross-tile duplicates before merging");
  ok &= check(out, summary.counts_match,
              "merged detections equal the ground-truth count on every plan (" +
                  std::to_string(summary.post_merge) + "/" + std::to_string(summary.truths) +
                  ")");
  ok &= check(out, report.aggregate.ap50 == 1.0 && report.aggregate.ap75 == 1.0 &&
                       report.aggregate.map == 1.0,
              "AP50 = AP75 = mAP = 1");
  ok &= check(out, report.instance.f_score == 1.0, "instance-wise F = 1");
  ok &= check(out, report.pixel.f_score == 1.0, "pixel-wise F = 1");
  out << (ok ? "selftest passed\n" : "selftest FAILED\n");
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symbol spotting in large raster floor plans"};
  app.require_subcommand(1);

  CommonFlags synth_flags, tiles_flags, anchors_flags, detect_flags, eval_flags, selftest_flags;
  int count = -1, width = -1, height = -1, k = -1;
  bool inference = false, from_tiles = false, render_boxes = false;
  std::string manifest, detections, backend, rawpred_dir, anchors_file;

  auto* synth = app.add_subcommand("synth", "generate a synthetic floor-plan corpus");
  synth_flags.attach(synth);
  synth->add_option("--count", count, "number of plans");
  synth->add_option("--width", width, "plan width in pixels");
  synth->add_option("--height", height, "plan height in pixels");

  auto* tiles = app.add_subcommand("prepare-tiles", "cut a tile dataset from a plan manifest");
  tiles_flags.attach(tiles);
  tiles->add_option("-m,--manifest", manifest, "plan manifest");
  tiles->add_flag("--inference", inference,
                  "emit every tile (named by tile id) instead of training tiles");

  auto* anchors = app.add_subcommand("anchors", "cluster prior anchor sizes");
  anchors_flags.attach(anchors);
  anchors->add_option("-m,--manifest", manifest, "plan or tile manifest");
  anchors->add_option("-k", k, "number of anchors");
  anchors->add_flag("--from-tiles", from_tiles,
                    "manifest is in network coordinates (output of prepare-tiles)");

  auto* detect = app.add_subcommand("detect", "tiled detection, decoding and merging");
  detect_flags.attach(detect);
  detect->add_option("-m,--manifest", manifest, "plan manifest");
  detect->add_option("--backend", backend, "oracle or file")
      ->check(CLI::IsMember({"oracle", "file"}));
  detect->add_option("--rawpred-dir", rawpred_dir, "directory of <tile_id>.rawpred files");
  detect->add_option("--anchors", anchors_file, "anchor file");
  detect->add_flag("--render", render_boxes, "write plans with detections burned in");

  auto* eval = app.add_subcommand("eval", "score detections against a manifest");
  eval_flags.attach(eval);
  eval->add_option("-m,--manifest", manifest, "ground-truth manifest");
  eval->add_option("-d,--detections", detections, "detections JSON");

  auto* selftest = app.add_subcommand("selftest", "oracle round trip on a synthetic corpus");
  selftest_flags.attach(selftest);
  selftest->add_option("--count", count, "number of plans");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*synth) {
      PipelineConfig cfg = synth_flags.resolve();
      if (count >= 0) cfg.synth.count = count;
      if (width >= 0) cfg.synth.width = width;
      if (height >= 0) cfg.synth.height = height;
      const fs::path dir = output_dir(cfg);
      cfg.paths.manifest = run_synth(cfg, dir, out).string();
      echo_config(dir, cfg);
    } else if (*tiles) {
      PipelineConfig cfg = tiles_flags.resolve();
      if (!manifest.empty()) cfg.paths.manifest = manifest;
      const fs::path dir = output_dir(cfg);
      const fs::path manifest_path = require_path(cfg.paths.manifest, "manifest (--manifest)");
      const Manifest plans = load_manifest(manifest_path);
      fs::create_directories(dir / "tiles");
      Manifest tile_manifest;
      tile_manifest.classes = plans.classes;
      const int side = cfg.tiling.side();
      for (const auto& img : plans.images) {
        const GrayImage plan = load_image(resolve_image(manifest_path, img.path));
        for (const auto& a : img.annotations) {
          if (a.box.w >= side || a.box.h >= side) {
            err << "warning: " << img.path << ": symbol " << to_string(a.box)
                << " is not smaller than the tile side " << side << "\n";
          }
        }
        if (inference) {
          for (const auto& frame : enumerate_tiles(plan.width(), plan.height(), cfg.tiling)) {
            const std::string id = tile_id(stem_of(img.path), frame);
            const std::string rel = "tiles/" + id + ".pgm";
            save_pgm(dir / rel, extract_tile(plan, frame, cfg.tiling.pad_value));
            tile_manifest.images.push_back({rel, tile_annotations(img.annotations, frame)});
          }
        } else {
          for (auto& t : extract_training_tiles(plan, img.annotations, cfg.tiling, cfg.augment,
                                                cfg.seed, stem_of(img.path))) {
            const std::string rel = "tiles/" + t.id + ".pgm";
            save_pgm(dir / rel, t.image);
            tile_manifest.images.push_back({rel, std::move(t.annotations)});
          }
        }
      }
      save_manifest(dir / "manifest.json", tile_manifest);
      out << tile_manifest.images.size() << " tiles written to " << (dir / "tiles").string()
          << "\n";
      echo_config(dir, cfg);
    } else if (*anchors) {
      PipelineConfig cfg = anchors_flags.resolve();
      if (!manifest.empty()) cfg.paths.manifest = manifest;
      if (k > 0) cfg.anchor_count = k;
      const fs::path dir = output_dir(cfg);
      const Manifest m = load_manifest(require_path(cfg.paths.manifest, "manifest (--manifest)"));
      const double to_network =
          from_tiles ? 1.0 : cfg.tiling.net_size / double(cfg.tiling.side());
      cfg.head.anchors = derive_anchors(m, to_network, cfg, err);
      save_anchors(dir / "anchors.json", cfg.head.anchors);
      cfg.paths.anchors = (dir / "anchors.json").string();
      for (const auto& p : cfg.head.anchors.priors) out << p.w << " x " << p.h << "\n";
      echo_config(dir, cfg);
    } else if (*detect) {
      PipelineConfig cfg = detect_flags.resolve();
      if (!manifest.empty()) cfg.paths.manifest = manifest;
      if (!backend.empty()) cfg.backend = backend;
      if (!rawpred_dir.empty()) cfg.paths.rawpred_dir = rawpred_dir;
      if (!anchors_file.empty()) {
        cfg.paths.anchors = anchors_file;
        cfg.head.anchors.priors.clear();
      }
      const fs::path dir = output_dir(cfg);
      run_detect(cfg, dir, render_boxes, out, err);
      echo_config(dir, cfg);
    } else if (*eval) {
      PipelineConfig cfg = eval_flags.resolve();
      if (!manifest.empty()) cfg.paths.manifest = manifest;
      if (!detections.empty()) cfg.paths.detections = detections;
      const fs::path dir = output_dir(cfg);
      run_eval(cfg, dir, out);
      echo_config(dir, cfg);
    } else if (*selftest) {
      PipelineConfig cfg = selftest_flags.resolve();
      if (count >= 0) cfg.synth.count = count;
      return run_selftest(cfg, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace symspot::cli
