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

#include "symspot/merger.hpp"

#include <algorithm>
#include <tuple>

#include "symspot/error.hpp"
#include "symspot/geometry.hpp"

namespace symspot {

void MergeConfig::validate() const {
  if (!(overlap_threshold > 0.0 && overlap_threshold <= 1.0)) {
    throw InvalidInput("merge: overlap_threshold must lie in (0, 1]");
  }
  if (score_tie_epsilon < 0.0) throw InvalidInput("merge: score_tie_epsilon must be >= 0");
}

bool detection_order(const Detection& a, const Detection& b) {
  const double area_a = a.box.area();
  const double area_b = b.box.area();
  return std::tie(b.score, area_b, a.box.x, a.box.y, a.class_id, a.box.w, a.box.h) <
         std::tie(a.score, area_a, b.box.x, b.box.y, b.class_id, b.box.w, b.box.h);
}

std::vector<Detection> merge_detections(std::vector<Detection> dets,
                                        const MergeConfig& cfg) {
  cfg.validate();
  std::sort(dets.begin(), dets.end(), detection_order);
  const std::size_t n = dets.size();
  std::vector<bool> alive(n, true);

  // Removing a box never makes another pair overlap, so pairs already passed
  // stay clean: one lexicographic sweep over (i, j) reaches the fixpoint.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && alive[i]; ++j) {
      if (!alive[j]) continue;
      const Detection& a = dets[i];
      const Detection& b = dets[j];
      if (cfg.per_class && a.class_id != b.class_id) continue;
      if (overlap_fraction_of_smaller(a.box, b.box) <= cfg.overlap_threshold) continue;
      if (std::abs(a.score - b.score) > cfg.score_tie_epsilon) {
        alive[j] = false;  // b follows a, so it has the lower score
      } else if (a.box.area() < b.box.area()) {
        alive[i] = false;
      } else {
        alive[j] = false;
      }
    }
  }

  std::vector<Detection> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (alive[i]) out.push_back(dets[i]);
  }
  return out;
}

}  // namespace symspot
