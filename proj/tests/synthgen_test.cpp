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

#include "symspot/synthgen.hpp"

#include <gtest/gtest.h>

#include "symspot/error.hpp"

namespace symspot {
namespace {

PlanSpec spec_with_seed(std::uint64_t seed, int side = 800) {
  PlanSpec spec;
  spec.width = spec.height = side;
  spec.seed = seed;
  return spec;
}

TEST(GeneratePlanTest, Deterministic) {
  const auto a = generate_plan(spec_with_seed(3));
  const auto b = generate_plan(spec_with_seed(3));
  EXPECT_EQ(a.image, b.image);
  ASSERT_EQ(a.annotations.size(), b.annotations.size());
  for (std::size_t i = 0; i < a.annotations.size(); ++i) {
    EXPECT_EQ(a.annotations[i].box, b.annotations[i].box);
    EXPECT_EQ(a.annotations[i].class_id, b.annotations[i].class_id);
  }
  EXPECT_NE(a.image, generate_plan(spec_with_seed(4)).image);
}

TEST(GeneratePlanTest, ZeroDensityGivesOnlyDoors) {
  PlanSpec spec = spec_with_seed(1);
  spec.density_min = spec.density_max = 0;
  const auto plan = generate_plan(spec);
  ASSERT_FALSE(plan.annotations.empty());
  for (const auto& a : plan.annotations) {
    EXPECT_EQ(a.class_id, static_cast<int>(SymbolClass::kDoor));
    EXPECT_EQ(a.class_name, "door");
  }
}

TEST(GeneratePlanTest, AnnotationInvariants) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto plan = generate_plan(spec_with_seed(seed, seed % 2 ? 1024 : 640));
    const auto& img = plan.image;
    const auto& anns = plan.annotations;
    for (std::size_t i = 0; i < anns.size(); ++i) {
      const BBox& b = anns[i].box;
      EXPECT_GE(b.x, 0);
      EXPECT_GE(b.y, 0);
      EXPECT_LE(b.right(), img.width());
      EXPECT_LE(b.bottom(), img.height());
      EXPECT_GE(std::min(b.w, b.h), 12);
      EXPECT_LE(std::max(b.w, b.h), 200);
      EXPECT_EQ(anns[i].class_name, symbol_class_names()[std::size_t(anns[i].class_id)]);
      int ink = 0;
      for (int y = int(b.y); y < int(b.bottom()); ++y) {
        for (int x = int(b.x); x < int(b.right()); ++x) ink += img.at(x, y) < 128;
      }
      EXPECT_GE(ink, 5) << to_string(b);
      for (std::size_t j = i + 1; j < anns.size(); ++j) {
        const bool doors = anns[i].class_id == 0 && anns[j].class_id == 0;
        if (!doors) EXPECT_EQ(intersection_area(b, anns[j].box), 0.0);
      }
    }
  }
}

TEST(GeneratePlanTest, EveryLibrarySymbolAppears) {
  std::vector<int> seen(kNumSymbolClasses, 0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (const auto& a : generate_plan(spec_with_seed(seed, 1024)).annotations) {
      ++seen[std::size_t(a.class_id)];
    }
  }
  for (int c = 0; c < kNumSymbolClasses; ++c) EXPECT_GT(seen[std::size_t(c)], 0) << c;
}

TEST(GeneratePlanTest, ClassSetRestrictsTheLibrary) {
  PlanSpec spec = spec_with_seed(2);
  spec.class_set = {static_cast<int>(SymbolClass::kSink)};
  for (const auto& a : generate_plan(spec).annotations) {
    EXPECT_TRUE(a.class_id == 0 || a.class_id == static_cast<int>(SymbolClass::kSink));
  }
}

TEST(GeneratePlanTest, NoiseLevelZeroIgnoresDegradeSettings) {
  PlanSpec a = spec_with_seed(5);
  PlanSpec b = a;
  b.degrade.flip_probability = 0.5;
  EXPECT_EQ(generate_plan(a).image, generate_plan(b).image);
}

TEST(GeneratePlanTest, NoiseKeepsAnnotations) {
  PlanSpec spec = spec_with_seed(5);
  const auto clean = generate_plan(spec);
  spec.noise_level = 3;
  const auto noisy = generate_plan(spec);
  EXPECT_NE(clean.image, noisy.image);
  ASSERT_EQ(clean.annotations.size(), noisy.annotations.size());
}

TEST(GeneratePlanTest, OverfullRoomsFail) {
  PlanSpec spec = spec_with_seed(0, 512);
  spec.room_split_depth = 0;
  spec.density_min = spec.density_max = 500;
  try {
    generate_plan(spec);
    FAIL() << "expected GenerationError";
  } catch (const GenerationError& e) {
    EXPECT_NE(std::string(e.what()).find("density"), std::string::npos);
  }
}

TEST(GeneratePlanTest, SpecValidation) {
  PlanSpec spec;
  spec.width = 300;
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec = {};
  spec.density_min = 3;
  spec.density_max = 1;
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec = {};
  spec.class_set = {42};
  EXPECT_THROW(spec.validate(), InvalidInput);
}

}  // namespace
}  // namespace symspot
