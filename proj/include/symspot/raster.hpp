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
#include <variant>
#include <vector>

namespace symspot {

inline constexpr std::uint8_t kInk = 0;
inline constexpr std::uint8_t kBackground = 255;

// Row-major 8-bit grayscale image. White (255) is background, black (0) is ink.
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = kBackground);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }

  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
  void set(int x, int y, std::uint8_t v) { data_[index(x, y)] = v; }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const std::uint8_t> pixels() const { return data_; }
  std::span<std::uint8_t> pixels() { return data_; }

  // Number of ink pixels (intensity below 128).
  std::size_t ink_count() const;

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

// Binary PGM (P5, maxval 255).
void save_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage load_pgm(const std::filesystem::path& path);

// Dispatches on the extension: .pgm, or .png (8-bit gray, or colour reduced
// to luminance).
GrayImage load_image(const std::filesystem::path& path);

// Reads only the header to report (width, height).
std::pair<int, int> image_size(const std::filesystem::path& path);

// Drawing primitives. Pixel (px, py) is addressed by its centre; strokes ink
// every pixel whose centre lies within width / 2 of the ideal curve.
struct LineSegment {
  double x0, y0, x1, y1;
  double width = 1.0;
};

// Outline of the pixel block [x, x + w) x [y, y + h), `width` pixels thick
// measured inwards.
struct RectOutline {
  int x, y, w, h;
  int width = 1;
};

struct FilledRect {
  int x, y, w, h;
};

// Circle or arc. Angles are in radians measured clockwise from +x (y points
// down); a span of 2*pi or more draws the full circle.
struct Arc {
  double cx, cy, radius;
  double start_angle = 0.0;
  double sweep = 6.283185307179586;
  double width = 1.0;
};

using Primitive = std::variant<LineSegment, RectOutline, FilledRect, Arc>;

// Inks the primitive in place, clipped to the image.
void draw_into(GrayImage& image, const Primitive& primitive);
GrayImage draw(GrayImage image, const Primitive& primitive);

struct DegradeConfig {
  // Per-pixel flip probability used by level 3.
  double flip_probability = 0.01;
};

// Level 0: identity. 1: erode ink by one pixel (4-neighbourhood). 2: dilate ink
// by one pixel. 3: flip each pixel independently with the configured
// probability.
GrayImage degrade(const GrayImage& image, int level, std::uint64_t seed,
                  const DegradeConfig& cfg = {});

}  // namespace symspot
