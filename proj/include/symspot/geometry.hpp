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

namespace symspot {

// Axis-aligned rectangle in pixel space, origin at the image top-left with y
// pointing down. The region is half-open: [x, x + w) x [y, y + h), so an
// integer box covers exactly w * h pixels.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  static BBox from_center(double cx, double cy, double w, double h) {
    return {cx - 0.5 * w, cy - 0.5 * h, w, h};
  }
  static BBox from_corners(double x0, double y0, double x1, double y1) {
    return {x0, y0, x1 - x0, y1 - y0};
  }

  bool operator==(const BBox&) const = default;
};

std::string to_string(const BBox& b);

// Throws InvalidInput when w <= 0 or h <= 0.
void require_valid(const BBox& b, const char* what);

double intersection_area(const BBox& a, const BBox& b);

// Intersection over union of two valid boxes.
double iou(const BBox& a, const BBox& b);

// Intersection as a fraction of the smaller box's area. This is the overlap
// measure used to suppress cross-tile duplicates.
double overlap_fraction_of_smaller(const BBox& a, const BBox& b);

// True when `inner` lies inside `outer` under the half-open convention.
bool contains(const BBox& outer, const BBox& inner);

// Placement of one square tile in plan space. The tile covers `side` plan
// pixels and is presented to the detector resized to `net_size`.
struct TileFrame {
  double x0 = 0.0;
  double y0 = 0.0;
  double side = 0.0;
  double net_size = 0.0;

  double scale() const { return side / net_size; }
  BBox region() const { return {x0, y0, side, side}; }

  bool operator==(const TileFrame&) const = default;
};

// Network-input coordinates of a tile -> plan coordinates.
BBox tile_to_plan(const BBox& box, const TileFrame& frame);
// Plan coordinates -> network-input coordinates of a tile.
BBox plan_to_tile(const BBox& box, const TileFrame& frame);

}  // namespace symspot
