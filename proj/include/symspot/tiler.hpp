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
#include <string>
#include <vector>

#include "symspot/annotation.hpp"
#include "symspot/geometry.hpp"
#include "symspot/random.hpp"
#include "symspot/raster.hpp"

namespace symspot {

struct TilingConfig {
  double alpha = 1.0;   // tile side = round(alpha * net_size)
  int net_size = 227;   // detector input side
  int stride = 50;      // distance between consecutive tile starts
  std::uint8_t pad_value = kBackground;

  int side() const;
  // Throws InvalidInput if a field is out of range.
  void validate() const;
};

// Tile start offsets along one axis of length `length`.
std::vector<int> axis_starts(int length, int side, int stride);

// Overlapping tiles covering a plan, row-major in (y0, x0). Starts are
// 0, S, 2S, ... while the tile fits, plus a final start clamped to the far
// border. A plan smaller than a tile gets a single (padded) tile at 0.
std::vector<TileFrame> enumerate_tiles(int plan_width, int plan_height,
                                       const TilingConfig& cfg);

// Crops the frame out of the plan (padding outside it) and resizes it to
// net_size x net_size. With side == net_size the crop is bit-exact.
GrayImage extract_tile(const GrayImage& plan, const TileFrame& frame,
                       std::uint8_t pad_value = kBackground);

// "<stem>_x<x0>_y<y0>"
std::string tile_id(const std::string& image_stem, const TileFrame& frame);

// Annotations of one tile in network coordinates: fully contained symbols are
// regular annotations, partially visible ones become ignore regions clipped to
// the tile.
std::vector<Annotation> tile_annotations(const std::vector<Annotation>& plan_truth,
                                         const TileFrame& frame);

// An axis-preserving augmentation of a square tile of side n: scale about the
// centre, then optional horizontal and vertical flips, then `quarter_turns`
// clockwise rotations by 90 degrees.
struct Augmentation {
  double scale = 1.0;
  bool flip_horizontal = false;
  bool flip_vertical = false;
  int quarter_turns = 0;

  bool is_identity() const;
  void apply_point(double n, double& x, double& y) const;
  void invert_point(double n, double& x, double& y) const;
  BBox apply(const BBox& box, double n) const;
  BBox invert(const BBox& box, double n) const;
  GrayImage apply(const GrayImage& tile, std::uint8_t pad_value) const;
};

struct AugmentConfig {
  bool flip_horizontal = false;
  bool flip_vertical = false;
  bool rotate90 = false;
  // Maximum relative scale change, at most 0.1.
  double scale_jitter = 0.0;
  // Extra augmented variants emitted per kept tile.
  int copies = 0;

  bool enabled() const {
    return copies > 0 &&
           (flip_horizontal || flip_vertical || rotate90 || scale_jitter > 0.0);
  }
};

Augmentation sample_augmentation(const AugmentConfig& cfg, Rng& rng);

struct TrainingTile {
  std::string id;
  TileFrame frame;
  Augmentation augmentation;
  GrayImage image;
  std::vector<Annotation> annotations;
};

// Extracts every tile that fully contains at least one annotation, plus the
// configured augmented copies. Throws InvalidInput for an annotation outside
// the plan.
std::vector<TrainingTile> extract_training_tiles(
    const GrayImage& plan, const std::vector<Annotation>& annotations,
    const TilingConfig& cfg, const AugmentConfig& augment, std::uint64_t seed,
    const std::string& image_stem = "plan");

}  // namespace symspot
