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

#include "symspot/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "symspot/error.hpp"
#include "symspot/random.hpp"

namespace symspot {
namespace {

constexpr std::uint8_t kInkThreshold = 128;

bool is_ink(std::uint8_t v) { return v < kInkThreshold; }

std::string path_str(const std::filesystem::path& p) { return p.string(); }

// Skips whitespace and '#' comments between PGM header tokens.
void skip_separators(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in, const std::filesystem::path& path) {
  skip_separators(in);
  int v = -1;
  if (!(in >> v) || v < 0) {
    throw FormatError("malformed PGM header in " + path_str(path));
  }
  return v;
}

struct PgmHeader {
  int width = 0;
  int height = 0;
};

PgmHeader read_pgm_header(std::istream& in, const std::filesystem::path& path) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw FormatError("not a binary PGM (P5) file: " + path_str(path));
  }
  PgmHeader h;
  h.width = read_header_int(in, path);
  h.height = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (h.width < 1 || h.height < 1) {
    throw FormatError("PGM with empty dimensions: " + path_str(path));
  }
  if (maxval != 255) {
    throw FormatError("PGM maxval must be 255, found " +
                      std::to_string(maxval) + " in " + path_str(path));
  }
  // Exactly one whitespace byte separates the header from the raster.
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) {
    throw FormatError("malformed PGM header in " + path_str(path));
  }
  return h;
}

bool has_extension(const std::filesystem::path& path, const char* ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

GrayImage load_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path_str(path).c_str())) {
    throw IoError("cannot read PNG " + path_str(path) + ": " + img.message);
  }
  img.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, data.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw FormatError("corrupt PNG " + path_str(path) + ": " + msg);
  }
  return GrayImage(static_cast<int>(img.width), static_cast<int>(img.height),
                   std::move(data));
}

void ink(GrayImage& image, int x, int y) {
  if (image.in_bounds(x, y)) image.set(x, y, kInk);
}

double segment_distance(double px, double py, const LineSegment& s) {
  const double dx = s.x1 - s.x0;
  const double dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((px - s.x0) * dx + (py - s.y0) * dy) / len2, 0.0, 1.0);
  }
  return std::hypot(px - (s.x0 + t * dx), py - (s.y0 + t * dy));
}

constexpr double kStrokeSlack = 1e-9;

void draw_line(GrayImage& image, const LineSegment& s) {
  const double half = 0.5 * s.width;
  const int x_lo = static_cast<int>(std::floor(std::min(s.x0, s.x1) - half));
  const int x_hi = static_cast<int>(std::ceil(std::max(s.x0, s.x1) + half));
  const int y_lo = static_cast<int>(std::floor(std::min(s.y0, s.y1) - half));
  const int y_hi = static_cast<int>(std::ceil(std::max(s.y0, s.y1) + half));
  for (int y = std::max(y_lo, 0); y <= std::min(y_hi, image.height() - 1); ++y) {
    for (int x = std::max(x_lo, 0); x <= std::min(x_hi, image.width() - 1); ++x) {
      if (segment_distance(x, y, s) <= half + kStrokeSlack) ink(image, x, y);
    }
  }
}

void draw_rect_outline(GrayImage& image, const RectOutline& r) {
  if (r.w <= 0 || r.h <= 0 || r.width <= 0) return;
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      const bool edge = x < r.x + r.width || x >= r.x + r.w - r.width ||
                        y < r.y + r.width || y >= r.y + r.h - r.width;
      if (edge) ink(image, x, y);
    }
  }
}

void draw_filled_rect(GrayImage& image, const FilledRect& r) {
  const int x_lo = std::max(r.x, 0);
  const int x_hi = std::min(r.x + r.w, image.width());
  const int y_lo = std::max(r.y, 0);
  const int y_hi = std::min(r.y + r.h, image.height());
  for (int y = y_lo; y < y_hi; ++y) {
    for (int x = x_lo; x < x_hi; ++x) image.set(x, y, kInk);
  }
}

bool angle_in_sweep(double angle, double start, double sweep) {
  if (sweep >= 2.0 * std::numbers::pi) return true;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double rel = std::fmod(angle - start, kTwoPi);
  if (rel < 0.0) rel += kTwoPi;
  return rel <= sweep + 1e-12;
}

void draw_arc(GrayImage& image, const Arc& a) {
  const double half = 0.5 * a.width;
  const double reach = a.radius + half;
  const int x_lo = static_cast<int>(std::floor(a.cx - reach));
  const int x_hi = static_cast<int>(std::ceil(a.cx + reach));
  const int y_lo = static_cast<int>(std::floor(a.cy - reach));
  const int y_hi = static_cast<int>(std::ceil(a.cy + reach));
  for (int y = std::max(y_lo, 0); y <= std::min(y_hi, image.height() - 1); ++y) {
    for (int x = std::max(x_lo, 0); x <= std::min(x_hi, image.width() - 1); ++x) {
      const double dx = x - a.cx;
      const double dy = y - a.cy;
      const double d = std::hypot(dx, dy);
      if (std::abs(d - a.radius) > half + kStrokeSlack) continue;
      if (d == 0.0 || angle_in_sweep(std::atan2(dy, dx), a.start_angle, a.sweep)) {
        ink(image, x, y);
      }
    }
  }
}

// Applies `keep_or_set` to every pixel using its 4-neighbourhood. Pixels
// outside the image count as background.
template <typename Rule>
GrayImage morph(const GrayImage& src, Rule rule) {
  GrayImage out = src;
  const auto ink_at = [&](int x, int y) {
    return src.in_bounds(x, y) && is_ink(src.at(x, y));
  };
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const int n = ink_at(x - 1, y) + ink_at(x + 1, y) + ink_at(x, y - 1) +
                    ink_at(x, y + 1);
      out.set(x, y, rule(src.at(x, y), n));
    }
  }
  return out;
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw InvalidInput("image dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw InvalidInput("image dimensions must be positive");
  }
  if (data_.size() !=
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidInput("pixel buffer does not match image dimensions");
  }
}

std::size_t GrayImage::ink_count() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), is_ink));
}

void save_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path_str(path));
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  const auto px = image.pixels();
  out.write(reinterpret_cast<const char*>(px.data()),
            static_cast<std::streamsize>(px.size()));
  if (!out) throw IoError("write failed: " + path_str(path));
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path_str(path));
  const PgmHeader h = read_pgm_header(in, path);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(h.width) *
                                 static_cast<std::size_t>(h.height));
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw FormatError("truncated PGM raster in " + path_str(path));
  }
  return GrayImage(h.width, h.height, std::move(data));
}

GrayImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("image not found: " + path_str(path));
  }
  if (has_extension(path, ".png")) return load_png(path);
  return load_pgm(path);
}

std::pair<int, int> image_size(const std::filesystem::path& path) {
  if (has_extension(path, ".png")) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path_str(path).c_str())) {
      throw IoError("cannot read PNG " + path_str(path));
    }
    const std::pair<int, int> size{static_cast<int>(img.width),
                                   static_cast<int>(img.height)};
    png_image_free(&img);
    return size;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image: " + path_str(path));
  const PgmHeader h = read_pgm_header(in, path);
  return {h.width, h.height};
}

void draw_into(GrayImage& image, const Primitive& primitive) {
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          draw_line(image, p);
        } else if constexpr (std::is_same_v<T, RectOutline>) {
          draw_rect_outline(image, p);
        } else if constexpr (std::is_same_v<T, FilledRect>) {
          draw_filled_rect(image, p);
        } else {
          draw_arc(image, p);
        }
      },
      primitive);
}

GrayImage draw(GrayImage image, const Primitive& primitive) {
  draw_into(image, primitive);
  return image;
}

GrayImage degrade(const GrayImage& image, int level, std::uint64_t seed,
                  const DegradeConfig& cfg) {
  switch (level) {
    case 0:
      return image;
    case 1:
      return morph(image, [](std::uint8_t v, int ink_neighbours) {
        return (is_ink(v) && ink_neighbours < 4) ? kBackground : v;
      });
    case 2:
      return morph(image, [](std::uint8_t v, int ink_neighbours) {
        return (!is_ink(v) && ink_neighbours > 0) ? kInk : v;
      });
    case 3: {
      if (cfg.flip_probability < 0.0 || cfg.flip_probability > 1.0) {
        throw InvalidInput("flip probability must lie in [0, 1]");
      }
      GrayImage out = image;
      Rng rng(seed);
      for (auto& v : out.pixels()) {
        if (rng.bernoulli(cfg.flip_probability)) {
          v = static_cast<std::uint8_t>(255 - v);
        }
      }
      return out;
    }
    default:
      throw InvalidInput("degradation level must be 0, 1, 2 or 3, got " +
                         std::to_string(level));
  }
}

}  // namespace symspot
