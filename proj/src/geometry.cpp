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

#include "symspot/geometry.hpp"

#include <algorithm>
#include <cstdio>

#include "symspot/error.hpp"

namespace symspot {

std::string to_string(const BBox& b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "(%g, %g, %g, %g)", b.x, b.y, b.w, b.h);
  return buf;
}

void require_valid(const BBox& b, const char* what) {
  if (!b.valid()) {
    throw InvalidInput(std::string(what) + ": degenerate box " + to_string(b));
  }
}

namespace {

// Overlap length of [a0, a0 + aw) and [b0, b0 + bw). A nested interval
// returns its own length, so iou(a, a) is exactly 1 even when
// (x + w) - x != w in floating point.
double overlap_1d(double a0, double aw, double b0, double bw) {
  if (a0 >= b0 && a0 + aw <= b0 + bw) return aw;
  if (b0 >= a0 && b0 + bw <= a0 + aw) return bw;
  return std::min(a0 + aw, b0 + bw) - std::max(a0, b0);
}

}  // namespace

double intersection_area(const BBox& a, const BBox& b) {
  const double iw = overlap_1d(a.x, a.w, b.x, b.w);
  const double ih = overlap_1d(a.y, a.h, b.y, b.h);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BBox& a, const BBox& b) {
  require_valid(a, "iou");
  require_valid(b, "iou");
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double overlap_fraction_of_smaller(const BBox& a, const BBox& b) {
  require_valid(a, "overlap_fraction_of_smaller");
  require_valid(b, "overlap_fraction_of_smaller");
  const double inter = intersection_area(a, b);
  return std::clamp(inter / std::min(a.area(), b.area()), 0.0, 1.0);
}

bool contains(const BBox& outer, const BBox& inner) {
  return inner.x >= outer.x && inner.y >= outer.y &&
         inner.right() <= outer.right() && inner.bottom() <= outer.bottom();
}

BBox tile_to_plan(const BBox& box, const TileFrame& frame) {
  const double s = frame.scale();
  return {frame.x0 + box.x * s, frame.y0 + box.y * s, box.w * s, box.h * s};
}

BBox plan_to_tile(const BBox& box, const TileFrame& frame) {
  const double s = frame.scale();
  return {(box.x - frame.x0) / s, (box.y - frame.y0) / s, box.w / s, box.h / s};
}

}  // namespace symspot
