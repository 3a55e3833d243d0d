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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "symspot/backend.hpp"
#include "symspot/json_io.hpp"
#include "symspot/merger.hpp"
#include "symspot/tiler.hpp"
#include "symspot/yolo_head.hpp"

namespace symspot::cli {

struct SynthOptions {
  int count = 4;
  int width = 1024;
  int height = 1024;
  int room_split_depth = 3;
  int density_min = 1;
  int density_max = 3;
  std::vector<int> class_set;  // empty = whole library
  int noise_level = 0;
  double flip_probability = 0.01;
};

struct Paths {
  std::string manifest;
  std::string output;
  std::string detections;
  std::string rawpred_dir;
  std::string anchors;
};

// Everything a run depends on. A run writes this back, fully resolved, as
// config.resolved.json next to its outputs; passing that file as --config
// repeats the run.
struct PipelineConfig {
  TilingConfig tiling;
  // Anchors may stay empty; detect then clusters them from the manifest.
  HeadConfig head;
  MergeConfig merge;
  std::string backend = "oracle";  // "oracle" or "file"
  OracleConfig oracle;
  double score_threshold = 0.25;
  int anchor_count = 10;
  std::uint64_t seed = 0;
  int jobs = 1;
  SynthOptions synth;
  AugmentConfig augment;
  Paths paths;

  // Throws InvalidInput on any out-of-range field.
  void validate() const;
};

PipelineConfig config_from_json(const Json& doc);
Json config_to_json(const PipelineConfig& cfg);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace symspot::cli
