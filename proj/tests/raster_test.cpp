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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "symspot/error.hpp"
#include "symspot/synthgen.hpp"

namespace symspot {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "symspot_raster_test";
  fs::create_directories(dir);
  return dir / name;
}

TEST(PgmTest, RoundTripIsLossless) {
  const GrayImage img(2, 2, std::vector<std::uint8_t>{0, 255, 128, 64});
  const auto path = temp_path("tiny.pgm");
  save_pgm(path, img);
  EXPECT_EQ(load_pgm(path), img);
  EXPECT_EQ(load_image(path), img);
  EXPECT_EQ(image_size(path), (std::pair<int, int>{2, 2}));
}

TEST(PgmTest, SinglePixelFileIsMinimal) {
  const auto path = temp_path("one.pgm");
  save_pgm(path, GrayImage(1, 1));
  // "P5\n1 1\n255\n" plus one byte.
  EXPECT_EQ(fs::file_size(path), 12u);
}

TEST(PgmTest, MissingFileIsIoError) {
  EXPECT_THROW(load_image(temp_path("does_not_exist.pgm")), IoError);
  EXPECT_THROW(load_pgm(temp_path("does_not_exist.pgm")), IoError);
}

TEST(PgmTest, CorruptFilesAreRejected) {
  const auto path = temp_path("bad.pgm");
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n4 4\n255\n" << "abc";  // truncated raster
  }
  EXPECT_THROW(load_pgm(path), FormatError);
  {
    std::ofstream out(path, std::ios::binary);
    out << "P2\n1 1\n255\n0\n";
  }
  EXPECT_THROW(load_pgm(path), FormatError);
}

TEST(PgmTest, HeaderCommentsAreSkipped) {
  const auto path = temp_path("comment.pgm");
  {
    std::ofstream out(path, std::ios::binary);
    out << "P5\n# made by hand\n2 1\n255\n";
    out.put(char(7));
    out.put(char(9));
  }
  const GrayImage img = load_pgm(path);
  EXPECT_EQ(img.at(0, 0), 7);
  EXPECT_EQ(img.at(1, 0), 9);
}

TEST(DrawTest, HorizontalLineInksTenPixels) {
  const GrayImage img = draw(GrayImage(10, 10), LineSegment{0, 5, 9, 5, 1.0});
  EXPECT_EQ(img.ink_count(), 10u);
  for (int x = 0; x < 10; ++x) EXPECT_EQ(img.at(x, 5), kInk);
}

TEST(DrawTest, ZeroRadiusCircleIsOnePixel) {
  const GrayImage img = draw(GrayImage(10, 10), Arc{4, 6, 0.0});
  EXPECT_EQ(img.ink_count(), 1u);
  EXPECT_EQ(img.at(4, 6), kInk);
}

TEST(DrawTest, RectangleOutlinePerimeter) {
  const GrayImage img = draw(GrayImage(10, 10), RectOutline{1, 1, 8, 8, 1});
  EXPECT_EQ(img.ink_count(), 28u);
}

TEST(DrawTest, FilledRectIsClipped) {
  const GrayImage img = draw(GrayImage(10, 10), FilledRect{-5, 8, 100, 100});
  EXPECT_EQ(img.ink_count(), 20u);
}

TEST(DrawTest, QuarterArcStaysInItsQuadrant) {
  const GrayImage img =
      draw(GrayImage(30, 30), Arc{10, 10, 8, 0.0, 0.5 * std::numbers::pi, 1.0});
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 30; ++x) {
      if (img.at(x, y) == kInk) {
        EXPECT_GE(x, 10);
        EXPECT_GE(y, 10);
      }
    }
  }
  EXPECT_EQ(img.at(18, 10), kInk);
  EXPECT_EQ(img.at(10, 18), kInk);
}

TEST(DrawTest, DrawingIsIdempotent) {
  const std::vector<Primitive> prims = {LineSegment{1, 2, 27, 19, 2.5}, RectOutline{3, 4, 20, 9, 2},
                                        FilledRect{10, 10, 5, 7}, Arc{15, 15, 9, 1.0, 2.0, 1.5}};
  for (const auto& p : prims) {
    const GrayImage once = draw(GrayImage(32, 32), p);
    EXPECT_EQ(draw(once, p), once);
  }
}

TEST(DegradeTest, LevelZeroIsIdentity) {
  const GrayImage img = draw(GrayImage(10, 10), LineSegment{0, 5, 9, 5, 1.0});
  EXPECT_EQ(degrade(img, 0, 1), img);
}

TEST(DegradeTest, DilationGrowsThinLine) {
  const GrayImage img = draw(GrayImage(10, 10), LineSegment{0, 5, 9, 5, 1.0});
  EXPECT_GT(degrade(img, 2, 1).ink_count(), 10u);
}

TEST(DegradeTest, ErosionThinsThickStroke) {
  const GrayImage img = draw(GrayImage(20, 20), FilledRect{5, 5, 6, 6});
  const GrayImage eroded = degrade(img, 1, 0);
  EXPECT_EQ(eroded.ink_count(), 16u);
}

TEST(DegradeTest, ZeroFlipProbabilityIsIdentity) {
  PlanSpec spec;
  spec.width = spec.height = 512;
  spec.seed = 4;
  const GrayImage img = generate_plan(spec).image;
  EXPECT_EQ(degrade(img, 3, 99, DegradeConfig{0.0}), img);
}

TEST(DegradeTest, FlipNoiseIsSeededAndRoughlyCalibrated) {
  const GrayImage img(200, 200);
  const GrayImage a = degrade(img, 3, 7);
  EXPECT_EQ(a, degrade(img, 3, 7));
  EXPECT_NE(a, degrade(img, 3, 8));
  // 40000 pixels at p = 0.01: mean 400, sd ~ 20.
  EXPECT_NEAR(static_cast<double>(a.ink_count()), 400.0, 100.0);
}

TEST(DegradeTest, InvalidLevelThrows) {
  EXPECT_THROW(degrade(GrayImage(4, 4), 4, 0), InvalidInput);
  EXPECT_THROW(degrade(GrayImage(4, 4), -1, 0), InvalidInput);
}

TEST(DegradeTest, MonotoneInkCountOnSyntheticPlans) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PlanSpec spec;
    spec.width = spec.height = 600;
    spec.seed = seed;
    const GrayImage img = generate_plan(spec).image;
    EXPECT_LE(degrade(img, 1, seed).ink_count(), img.ink_count());
    EXPECT_GE(degrade(img, 2, seed).ink_count(), img.ink_count());
  }
}

}  // namespace
}  // namespace symspot
