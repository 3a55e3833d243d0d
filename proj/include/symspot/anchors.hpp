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
#include <span>
#include <vector>

namespace symspot {

struct BoxSize {
  double w = 0.0;
  double h = 0.0;

  auto operator<=>(const BoxSize&) const = default;
};

// IoU of two boxes sharing the same centre.
double centered_iou(const BoxSize& a, const BoxSize& b);

// Prior box sizes in network-input pixels, sorted by area ascending.
struct AnchorSet {
  std::vector<BoxSize> priors;

  std::size_t size() const { return priors.size(); }
};

struct AnchorClustering {
  AnchorSet anchors;
  // Mean (1 - IoU) distortion after each assignment step.
  std::vector<double> distortion;
  int iterations = 0;
};

// k-means over box sizes with distance 1 - centered IoU, k-means++ seeding.
// Throws InvalidInput for empty input, non-positive sizes, or k larger than
// the number of distinct sizes.
AnchorClustering cluster_anchors_traced(std::span<const BoxSize> sizes, int k,
                                        std::uint64_t seed, int max_iters = 100);

AnchorSet cluster_anchors(std::span<const BoxSize> sizes, int k,
                          std::uint64_t seed, int max_iters = 100);

double mean_distortion(std::span<const BoxSize> sizes, const AnchorSet& anchors);

// Anchor file: JSON list of [w, h] pairs.
void save_anchors(const std::filesystem::path& path, const AnchorSet& anchors);
AnchorSet load_anchors(const std::filesystem::path& path);

}  // namespace symspot
