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

// Independent reference computations for the tests. None of these call into
// the code they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "symspot/annotation.hpp"
#include "symspot/anchors.hpp"

namespace symspot::oracle {

// Integer box as a half-open pixel block.
struct IntBox {
  int x, y, w, h;
};

inline bool covers(const IntBox& b, int px, int py) {
  return px >= b.x && px < b.x + b.w && py >= b.y && py < b.y + b.h;
}

// IoU by counting pixels of the bounding canvas.
inline double pixel_iou(const IntBox& a, const IntBox& b) {
  const int x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
  const int x1 = std::max(a.x + a.w, b.x + b.w), y1 = std::max(a.y + a.h, b.y + b.h);
  long inter = 0, uni = 0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool in_a = covers(a, x, y), in_b = covers(b, x, y);
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

struct MaskPRF {
  long long inter = 0, retrieved = 0, relevant = 0;
};

// Per-class pixel masks over a w x h plan; boxes are integer and in bounds.
inline MaskPRF mask_counts(const std::vector<Detection>& dets,
                           const std::vector<Annotation>& truths, int w, int h) {
  std::set<int> classes;
  for (const auto& d : dets) classes.insert(d.class_id);
  for (const auto& t : truths) classes.insert(t.class_id);
  MaskPRF out;
  for (int c : classes) {
    std::vector<char> det_mask(static_cast<std::size_t>(w * h), 0);
    std::vector<char> gt_mask(static_cast<std::size_t>(w * h), 0);
    const auto paint = [&](std::vector<char>& mask, const BBox& b) {
      for (int y = static_cast<int>(b.y); y < static_cast<int>(b.bottom()); ++y) {
        for (int x = static_cast<int>(b.x); x < static_cast<int>(b.right()); ++x) {
          mask[static_cast<std::size_t>(y * w + x)] = 1;
        }
      }
    };
    for (const auto& d : dets) {
      if (d.class_id == c) paint(det_mask, d.box);
    }
    for (const auto& t : truths) {
      if (t.class_id == c) paint(gt_mask, t.box);
    }
    for (std::size_t i = 0; i < det_mask.size(); ++i) {
      out.inter += det_mask[i] && gt_mask[i];
      out.retrieved += det_mask[i];
      out.relevant += gt_mask[i];
    }
  }
  return out;
}

inline double shared_center_iou(const BoxSize& a, const BoxSize& b) {
  const double inter = std::min(a.w, b.w) * std::min(a.h, b.h);
  return inter / (a.w * a.h + b.w * b.h - inter);
}

struct Partition {
  BoxSize first, second;
  double distortion;
};

// Best 2-clustering with mean centroids, by enumerating every split of the
// distinct sizes into two non-empty groups.
inline Partition best_two_partition(const std::vector<BoxSize>& sizes) {
  std::vector<BoxSize> distinct(sizes.begin(), sizes.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const std::size_t n = distinct.size();
  Partition best{{}, {}, 1e300};
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    BoxSize sums[2] = {{0, 0}, {0, 0}};
    double counts[2] = {0, 0};
    const auto group = [&](const BoxSize& s) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(distinct.begin(), distinct.end(), s) - distinct.begin());
      return (mask >> idx) & 1u;
    };
    for (const auto& s : sizes) {
      const auto g = group(s);
      sums[g].w += s.w;
      sums[g].h += s.h;
      counts[g] += 1;
    }
    const BoxSize c[2] = {{sums[0].w / counts[0], sums[0].h / counts[0]},
                          {sums[1].w / counts[1], sums[1].h / counts[1]}};
    double d = 0;
    for (const auto& s : sizes) d += 1.0 - shared_center_iou(s, c[group(s)]);
    if (d < best.distortion) best = {c[0], c[1], d};
  }
  return best;
}

// Central finite difference of f along coordinate i of x.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double eps) {
  const double orig = x[i];
  x[i] = orig + eps;
  const double plus = f(x);
  x[i] = orig - eps;
  const double minus = f(x);
  return (plus - minus) / (2.0 * eps);
}

}  // namespace symspot::oracle
