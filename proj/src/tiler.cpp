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

#include "symspot/tiler.hpp"

#include <algorithm>
#include <cmath>

#include "symspot/error.hpp"

namespace symspot {
namespace {

// Bilinear sample with pixel centres at integer coordinates; samples outside
// the image read `pad`.
double sample_bilinear(const GrayImage& img, double x, double y,
                       std::uint8_t pad) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int ix = static_cast<int>(fx);
  const int iy = static_cast<int>(fy);
  const double ax = x - fx;
  const double ay = y - fy;
  const auto px = [&](int u, int v) -> double {
    return img.in_bounds(u, v) ? img.at(u, v) : pad;
  };
  const double top = px(ix, iy) * (1.0 - ax) + px(ix + 1, iy) * ax;
  const double bottom = px(ix, iy + 1) * (1.0 - ax) + px(ix + 1, iy + 1) * ax;
  return top * (1.0 - ay) + bottom * ay;
}

std::uint8_t to_pixel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

void require_in_plan(const Annotation& a, std::size_t index, int width,
                     int height) {
  const bool ok = a.box.valid() && a.box.x >= 0.0 && a.box.y >= 0.0 &&
                  a.box.right() <= width && a.box.bottom() <= height;
  if (!ok) {
    throw InvalidInput("annotation #" + std::to_string(index) + " (class " +
                       std::to_string(a.class_id) + " '" + a.class_name +
                       "', box " + to_string(a.box) +
                       ") lies outside the plan bounds " +
                       std::to_string(width) + "x" + std::to_string(height));
  }
}

std::vector<Annotation> augment_annotations(const std::vector<Annotation>& in,
                                            const Augmentation& aug, double n) {
  const BBox canvas{0.0, 0.0, n, n};
  std::vector<Annotation> out;
  for (const auto& a : in) {
    Annotation t = a;
    t.box = aug.apply(a.box, n);
    if (contains(canvas, t.box)) {
      out.push_back(std::move(t));
    } else if (intersection_area(canvas, t.box) > 0.0) {
      const double x0 = std::max(t.box.x, 0.0);
      const double y0 = std::max(t.box.y, 0.0);
      t.box = BBox::from_corners(x0, y0, std::min(t.box.right(), n),
                                 std::min(t.box.bottom(), n));
      t.ignore = true;
      out.push_back(std::move(t));
    }
  }
  return out;
}

bool has_positive(const std::vector<Annotation>& anns) {
  return std::any_of(anns.begin(), anns.end(),
                     [](const Annotation& a) { return !a.ignore; });
}

}  // namespace

int TilingConfig::side() const {
  return static_cast<int>(std::lround(alpha * net_size));
}

void TilingConfig::validate() const {
  if (!(alpha > 0.0)) throw InvalidInput("tiling: alpha must be positive");
  if (net_size < 32) throw InvalidInput("tiling: net_size must be at least 32");
  if (stride < 1 || stride > side()) {
    throw InvalidInput("tiling: stride must lie in [1, alpha * net_size]");
  }
}

std::vector<int> axis_starts(int length, int side, int stride) {
  if (length <= side) return {0};
  std::vector<int> starts;
  for (int s = 0; s + side <= length; s += stride) starts.push_back(s);
  const int last = length - side;
  if (starts.back() != last) starts.push_back(last);
  return starts;
}

std::vector<TileFrame> enumerate_tiles(int plan_width, int plan_height,
                                       const TilingConfig& cfg) {
  cfg.validate();
  if (plan_width < 1 || plan_height < 1) {
    throw InvalidInput("plan dimensions must be positive");
  }
  const int side = cfg.side();
  const auto xs = axis_starts(plan_width, side, cfg.stride);
  const auto ys = axis_starts(plan_height, side, cfg.stride);
  std::vector<TileFrame> frames;
  frames.reserve(xs.size() * ys.size());
  for (int y0 : ys) {
    for (int x0 : xs) {
      frames.push_back({static_cast<double>(x0), static_cast<double>(y0),
                        static_cast<double>(side),
                        static_cast<double>(cfg.net_size)});
    }
  }
  return frames;
}

GrayImage extract_tile(const GrayImage& plan, const TileFrame& frame,
                       std::uint8_t pad_value) {
  const int n = static_cast<int>(frame.net_size);
  const int x0 = static_cast<int>(frame.x0);
  const int y0 = static_cast<int>(frame.y0);
  GrayImage tile(n, n, pad_value);
  if (frame.side == frame.net_size) {
    for (int v = 0; v < n; ++v) {
      for (int u = 0; u < n; ++u) {
        if (plan.in_bounds(x0 + u, y0 + v)) tile.set(u, v, plan.at(x0 + u, y0 + v));
      }
    }
    return tile;
  }
  const double s = frame.scale();
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      const double sx = frame.x0 + (u + 0.5) * s - 0.5;
      const double sy = frame.y0 + (v + 0.5) * s - 0.5;
      tile.set(u, v, to_pixel(sample_bilinear(plan, sx, sy, pad_value)));
    }
  }
  return tile;
}

std::string tile_id(const std::string& image_stem, const TileFrame& frame) {
  return image_stem + "_x" + std::to_string(std::lround(frame.x0)) + "_y" +
         std::to_string(std::lround(frame.y0));
}

std::vector<Annotation> tile_annotations(const std::vector<Annotation>& plan_truth,
                                         const TileFrame& frame) {
  const BBox region = frame.region();
  std::vector<Annotation> out;
  for (const auto& a : plan_truth) {
    if (contains(region, a.box)) {
      Annotation t = a;
      t.box = plan_to_tile(a.box, frame);
      out.push_back(std::move(t));
    } else if (intersection_area(region, a.box) > 0.0) {
      Annotation t = a;
      const BBox clipped = BBox::from_corners(
          std::max(a.box.x, region.x), std::max(a.box.y, region.y),
          std::min(a.box.right(), region.right()),
          std::min(a.box.bottom(), region.bottom()));
      t.box = plan_to_tile(clipped, frame);
      t.ignore = true;
      out.push_back(std::move(t));
    }
  }
  return out;
}

bool Augmentation::is_identity() const {
  return scale == 1.0 && !flip_horizontal && !flip_vertical &&
         quarter_turns % 4 == 0;
}

void Augmentation::apply_point(double n, double& x, double& y) const {
  const double c = 0.5 * n;
  x = c + scale * (x - c);
  y = c + scale * (y - c);
  if (flip_horizontal) x = n - x;
  if (flip_vertical) y = n - y;
  for (int k = 0; k < ((quarter_turns % 4) + 4) % 4; ++k) {
    const double rx = n - y;
    const double ry = x;
    x = rx;
    y = ry;
  }
}

void Augmentation::invert_point(double n, double& x, double& y) const {
  for (int k = 0; k < ((quarter_turns % 4) + 4) % 4; ++k) {
    const double rx = y;
    const double ry = n - x;
    x = rx;
    y = ry;
  }
  if (flip_vertical) y = n - y;
  if (flip_horizontal) x = n - x;
  const double c = 0.5 * n;
  x = c + (x - c) / scale;
  y = c + (y - c) / scale;
}

BBox Augmentation::apply(const BBox& box, double n) const {
  double x0 = box.x, y0 = box.y, x1 = box.right(), y1 = box.bottom();
  apply_point(n, x0, y0);
  apply_point(n, x1, y1);
  return BBox::from_corners(std::min(x0, x1), std::min(y0, y1),
                            std::max(x0, x1), std::max(y0, y1));
}

BBox Augmentation::invert(const BBox& box, double n) const {
  double x0 = box.x, y0 = box.y, x1 = box.right(), y1 = box.bottom();
  invert_point(n, x0, y0);
  invert_point(n, x1, y1);
  return BBox::from_corners(std::min(x0, x1), std::min(y0, y1),
                            std::max(x0, x1), std::max(y0, y1));
}

GrayImage Augmentation::apply(const GrayImage& tile, std::uint8_t pad_value) const {
  const int n = tile.width();
  if (tile.height() != n) throw InvalidInput("augmentation needs a square tile");
  GrayImage out(n, n, pad_value);
  for (int v = 0; v < n; ++v) {
    for (int u = 0; u < n; ++u) {
      double x = u + 0.5;
      double y = v + 0.5;
      invert_point(n, x, y);
      out.set(u, v, to_pixel(sample_bilinear(tile, x - 0.5, y - 0.5, pad_value)));
    }
  }
  return out;
}

Augmentation sample_augmentation(const AugmentConfig& cfg, Rng& rng) {
  if (cfg.scale_jitter < 0.0 || cfg.scale_jitter > 0.1) {
    throw InvalidInput("scale jitter must lie in [0, 0.1]");
  }
  Augmentation aug;
  if (cfg.scale_jitter > 0.0) {
    aug.scale = rng.uniform(1.0 - cfg.scale_jitter, 1.0 + cfg.scale_jitter);
  }
  if (cfg.flip_horizontal) aug.flip_horizontal = rng.bernoulli(0.5);
  if (cfg.flip_vertical) aug.flip_vertical = rng.bernoulli(0.5);
  if (cfg.rotate90) aug.quarter_turns = static_cast<int>(rng.uniform_int(0, 3));
  return aug;
}

std::vector<TrainingTile> extract_training_tiles(
    const GrayImage& plan, const std::vector<Annotation>& annotations,
    const TilingConfig& cfg, const AugmentConfig& augment, std::uint64_t seed,
    const std::string& image_stem) {
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    require_in_plan(annotations[i], i, plan.width(), plan.height());
  }
  std::vector<TrainingTile> out;
  if (annotations.empty()) return out;

  const double n = cfg.net_size;
  for (const auto& frame : enumerate_tiles(plan.width(), plan.height(), cfg)) {
    auto anns = tile_annotations(annotations, frame);
    if (!has_positive(anns)) continue;
    TrainingTile tile{tile_id(image_stem, frame), frame, Augmentation{},
                      extract_tile(plan, frame, cfg.pad_value), std::move(anns)};
    std::vector<TrainingTile> variants;
    if (augment.enabled()) {
      Rng rng(derive_seed(seed, tile.id));
      for (int c = 0; c < augment.copies; ++c) {
        const Augmentation aug = sample_augmentation(augment, rng);
        if (aug.is_identity()) continue;
        auto aug_anns = augment_annotations(tile.annotations, aug, n);
        if (!has_positive(aug_anns)) continue;
        variants.push_back({tile.id + "_aug" + std::to_string(c), frame, aug,
                            aug.apply(tile.image, cfg.pad_value),
                            std::move(aug_anns)});
      }
    }
    out.push_back(std::move(tile));
    for (auto& v : variants) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace symspot
