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
#include "symspot/raster.hpp"

namespace symspot {

// Built-in parametric symbol library; the value is the class_id.
enum class SymbolClass : int {
  kDoor = 0,
  kBathtub,
  kToilet,
  kSink,
  kWindow,
  kStove,
  kRefrigerator,
  kSofa,
};

inline constexpr int kNumSymbolClasses = 8;

const std::vector<std::string>& symbol_class_names();
std::vector<int> all_symbol_classes();

struct PlanSpec {
  int width = 1024;
  int height = 1024;
  std::uint64_t seed = 0;
  int room_split_depth = 3;
  int density_min = 1;  // symbols per room, drawn uniformly in
  int density_max = 3;  //   [density_min, density_max]
  std::vector<int> class_set = all_symbol_classes();
  int noise_level = 0;
  DegradeConfig degrade;

  void validate() const;
};

struct GeneratedPlan {
  GrayImage image;
  std::vector<Annotation> annotations;
};

inline constexpr int kWallThickness = 4;
inline constexpr int kMinRoomSide = 120;
inline constexpr int kMaxPlacementAttempts = 1000;

// Draws a floor plan: outer wall, recursive binary room partition, door arcs
// on interior walls, then non-overlapping symbols in each room, and finally
// the requested degradation. Deterministic in `spec`. Throws GenerationError
// when a symbol cannot be placed.
GeneratedPlan generate_plan(const PlanSpec& spec);

}  // namespace symspot
