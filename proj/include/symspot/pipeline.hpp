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

#include <string>
#include <vector>

#include "symspot/backend.hpp"
#include "symspot/merger.hpp"
#include "symspot/tiler.hpp"
#include "symspot/yolo_head.hpp"

namespace symspot {

struct DetectOptions {
  TilingConfig tiling;
  HeadConfig head;
  MergeConfig merge;
  double score_threshold = 0.25;
  int jobs = 1;
};

struct PlanDetections {
  std::vector<Detection> merged;  // plan space, sorted by detection_order
  std::size_t tiles = 0;
  std::size_t pre_merge = 0;      // decoded detections summed over tiles
};

// Tiled inference over one plan: enumerate tiles, query the backend per tile
// (up to `jobs` tiles concurrently), decode, map to plan space and merge
// cross-tile duplicates. The result does not depend on `jobs`.
PlanDetections detect_plan(const std::string& image_key, const std::string& image_stem,
                           int plan_width, int plan_height, const DetectorBackend& backend,
                           const DetectOptions& options);

}  // namespace symspot
