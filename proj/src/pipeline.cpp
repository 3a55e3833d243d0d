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

#include "symspot/pipeline.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "symspot/error.hpp"

namespace symspot {

PlanDetections detect_plan(const std::string& image_key, const std::string& image_stem,
                           int plan_width, int plan_height, const DetectorBackend& backend,
                           const DetectOptions& options) {
  if (!(options.score_threshold > 0.0 && options.score_threshold < 1.0)) {
    throw InvalidInput("score_threshold must lie in (0, 1)");
  }
  options.head.validate();
  options.merge.validate();
  if (options.head.net_size != options.tiling.net_size) {
    throw InvalidInput("head net_size differs from the tiling net_size");
  }
  const auto frames = enumerate_tiles(plan_width, plan_height, options.tiling);

  std::vector<std::vector<Detection>> per_tile(frames.size());
  std::vector<std::exception_ptr> errors(frames.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < frames.size(); i = next++) {
      try {
        const TileQuery query{image_key, tile_id(image_stem, frames[i]), frames[i]};
        const RawPrediction raw = backend.predict(query);
        auto dets = decode(raw, options.head, options.score_threshold);
        for (auto& d : dets) d.box = tile_to_plan(d.box, frames[i]);
        per_tile[i] = std::move(dets);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  PlanDetections out;
  out.tiles = frames.size();
  std::vector<Detection> all;
  for (auto& tile : per_tile) {
    out.pre_merge += tile.size();
    all.insert(all.end(), tile.begin(), tile.end());
  }
  out.merged = merge_detections(std::move(all), options.merge);
  return out;
}

}  // namespace symspot
