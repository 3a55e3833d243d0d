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

#include <vector>

#include "symspot/annotation.hpp"

namespace symspot {

struct MergeConfig {
  // Suppress when intersection exceeds this fraction of the smaller box.
  double overlap_threshold = 0.10;
  // Scores closer than this are a tie, resolved in favour of the larger box.
  double score_tie_epsilon = 0.05;
  bool per_class = true;

  void validate() const;
};

// Strict ordering used for suppression and output: score descending, area
// descending, then x, y and class_id ascending.
bool detection_order(const Detection& a, const Detection& b);

// Cross-tile duplicate removal. Scans pairs in the total order; for the first
// pair whose overlap fraction exceeds the threshold, drops the lower-score box,
// or the smaller one when the scores are within epsilon (the later one on an
// exact area tie), until no such pair remains. Survivors are returned
// unchanged, sorted by detection_order.
std::vector<Detection> merge_detections(std::vector<Detection> dets,
                                        const MergeConfig& cfg = {});

}  // namespace symspot
