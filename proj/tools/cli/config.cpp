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

#include "cli/config.hpp"

#include <set>

#include "symspot/error.hpp"

namespace symspot::cli {
namespace {

// Rejects keys a section does not know, so typos do not pass silently.
void check_keys(const Json& obj, const std::set<std::string>& known, const char* section) {
  if (!obj.is_object()) {
    throw InvalidInput(std::string("config: '") + section + "' must be an object");
  }
  for (const auto& item : obj.items()) {
    if (!known.count(item.key())) {
      throw InvalidInput(std::string("config: unknown key '") + item.key() + "' in " +
                         section);
    }
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& field) {
  if (obj.contains(key)) field = obj.at(key).get<T>();
}

}  // namespace

void PipelineConfig::validate() const {
  tiling.validate();
  merge.validate();
  oracle.validate();
  if (backend != "oracle" && backend != "file") {
    throw InvalidInput("config: backend must be 'oracle' or 'file'");
  }
  if (!(score_threshold > 0.0 && score_threshold < 1.0)) {
    throw InvalidInput("config: score_threshold must lie in (0, 1)");
  }
  if (head.grid_h < 1 || head.grid_w < 1) throw InvalidInput("config: grid must be >= 1x1");
  if (anchor_count < 1) throw InvalidInput("config: anchor_count must be >= 1");
  if (jobs < 1) throw InvalidInput("config: jobs must be >= 1");
  if (synth.count < 0) throw InvalidInput("config: synth.count must be >= 0");
  if (synth.noise_level < 0 || synth.noise_level > 3) {
    throw InvalidInput("config: noise level must be 0..3");
  }
  if (augment.scale_jitter < 0.0 || augment.scale_jitter > 0.1) {
    throw InvalidInput("config: augment.scale_jitter must lie in [0, 0.1]");
  }
}

PipelineConfig config_from_json(const Json& doc) {
  PipelineConfig cfg;
  try {
    check_keys(doc,
               {"tiling", "head", "merge", "backend", "oracle", "score_threshold",
                "anchor_count", "seed", "jobs", "synth", "augment", "paths"},
               "config");
    if (doc.contains("tiling")) {
      const auto& t = doc.at("tiling");
      check_keys(t, {"alpha", "net_size", "stride", "pad_value"}, "tiling");
      read(t, "alpha", cfg.tiling.alpha);
      read(t, "net_size", cfg.tiling.net_size);
      read(t, "stride", cfg.tiling.stride);
      read(t, "pad_value", cfg.tiling.pad_value);
    }
    if (doc.contains("head")) {
      const auto& h = doc.at("head");
      check_keys(h, {"grid_h", "grid_w", "anchors"}, "head");
      read(h, "grid_h", cfg.head.grid_h);
      read(h, "grid_w", cfg.head.grid_w);
      if (h.contains("anchors")) {
        for (const auto& pair : h.at("anchors")) {
          cfg.head.anchors.priors.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
        }
      }
    }
    if (doc.contains("merge")) {
      const auto& m = doc.at("merge");
      check_keys(m, {"overlap_threshold", "score_tie_epsilon", "per_class"}, "merge");
      read(m, "overlap_threshold", cfg.merge.overlap_threshold);
      read(m, "score_tie_epsilon", cfg.merge.score_tie_epsilon);
      read(m, "per_class", cfg.merge.per_class);
    }
    read(doc, "backend", cfg.backend);
    if (doc.contains("oracle")) {
      const auto& o = doc.at("oracle");
      check_keys(o, {"drop_prob", "jitter_sigma", "score_low", "score_high",
                     "false_positive_rate"},
                 "oracle");
      read(o, "drop_prob", cfg.oracle.drop_prob);
      read(o, "jitter_sigma", cfg.oracle.jitter_sigma);
      read(o, "score_low", cfg.oracle.score_low);
      read(o, "score_high", cfg.oracle.score_high);
      read(o, "false_positive_rate", cfg.oracle.false_positive_rate);
    }
    read(doc, "score_threshold", cfg.score_threshold);
    read(doc, "anchor_count", cfg.anchor_count);
    read(doc, "seed", cfg.seed);
    read(doc, "jobs", cfg.jobs);
    if (doc.contains("synth")) {
      const auto& s = doc.at("synth");
      check_keys(s, {"count", "width", "height", "room_split_depth", "density_min",
                     "density_max", "class_set", "noise_level", "flip_probability"},
                 "synth");
      read(s, "count", cfg.synth.count);
      read(s, "width", cfg.synth.width);
      read(s, "height", cfg.synth.height);
      read(s, "room_split_depth", cfg.synth.room_split_depth);
      read(s, "density_min", cfg.synth.density_min);
      read(s, "density_max", cfg.synth.density_max);
      read(s, "class_set", cfg.synth.class_set);
      read(s, "noise_level", cfg.synth.noise_level);
      read(s, "flip_probability", cfg.synth.flip_probability);
    }
    if (doc.contains("augment")) {
      const auto& a = doc.at("augment");
      check_keys(a, {"flip_horizontal", "flip_vertical", "rotate90", "scale_jitter", "copies"},
                 "augment");
      read(a, "flip_horizontal", cfg.augment.flip_horizontal);
      read(a, "flip_vertical", cfg.augment.flip_vertical);
      read(a, "rotate90", cfg.augment.rotate90);
      read(a, "scale_jitter", cfg.augment.scale_jitter);
      read(a, "copies", cfg.augment.copies);
    }
    if (doc.contains("paths")) {
      const auto& p = doc.at("paths");
      check_keys(p, {"manifest", "output", "detections", "rawpred_dir", "anchors"}, "paths");
      read(p, "manifest", cfg.paths.manifest);
      read(p, "output", cfg.paths.output);
      read(p, "detections", cfg.paths.detections);
      read(p, "rawpred_dir", cfg.paths.rawpred_dir);
      read(p, "anchors", cfg.paths.anchors);
    }
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return cfg;
}

Json config_to_json(const PipelineConfig& cfg) {
  const auto r = [](double v) { return round_significant(v); };
  Json doc;
  doc["tiling"] = {{"alpha", r(cfg.tiling.alpha)},
                   {"net_size", cfg.tiling.net_size},
                   {"stride", cfg.tiling.stride},
                   {"pad_value", cfg.tiling.pad_value}};
  Json anchors = Json::array();
  for (const auto& p : cfg.head.anchors.priors) anchors.push_back({r(p.w), r(p.h)});
  doc["head"] = {{"grid_h", cfg.head.grid_h}, {"grid_w", cfg.head.grid_w},
                 {"anchors", std::move(anchors)}};
  doc["merge"] = {{"overlap_threshold", r(cfg.merge.overlap_threshold)},
                  {"score_tie_epsilon", r(cfg.merge.score_tie_epsilon)},
                  {"per_class", cfg.merge.per_class}};
  doc["backend"] = cfg.backend;
  doc["oracle"] = {{"drop_prob", r(cfg.oracle.drop_prob)},
                   {"jitter_sigma", r(cfg.oracle.jitter_sigma)},
                   {"score_low", r(cfg.oracle.score_low)},
                   {"score_high", r(cfg.oracle.score_high)},
                   {"false_positive_rate", r(cfg.oracle.false_positive_rate)}};
  doc["score_threshold"] = r(cfg.score_threshold);
  doc["anchor_count"] = cfg.anchor_count;
  doc["seed"] = cfg.seed;
  doc["jobs"] = cfg.jobs;
  doc["synth"] = {{"count", cfg.synth.count},
                  {"width", cfg.synth.width},
                  {"height", cfg.synth.height},
                  {"room_split_depth", cfg.synth.room_split_depth},
                  {"density_min", cfg.synth.density_min},
                  {"density_max", cfg.synth.density_max},
                  {"class_set", cfg.synth.class_set},
                  {"noise_level", cfg.synth.noise_level},
                  {"flip_probability", r(cfg.synth.flip_probability)}};
  doc["augment"] = {{"flip_horizontal", cfg.augment.flip_horizontal},
                    {"flip_vertical", cfg.augment.flip_vertical},
                    {"rotate90", cfg.augment.rotate90},
                    {"scale_jitter", r(cfg.augment.scale_jitter)},
                    {"copies", cfg.augment.copies}};
  doc["paths"] = {{"manifest", cfg.paths.manifest},
                  {"output", cfg.paths.output},
                  {"detections", cfg.paths.detections},
                  {"rawpred_dir", cfg.paths.rawpred_dir},
                  {"anchors", cfg.paths.anchors}};
  return doc;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json(path));
}

}  // namespace symspot::cli
