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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "symspot/error.hpp"
#include "symspot/random.hpp"

namespace symspot {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kOuterMargin = 16;
constexpr int kRoomPadding = 3;   // clearance between symbols and walls
constexpr int kSymbolGap = 3;     // clearance between neighbouring symbols
constexpr int kDoorAttempts = 50;

struct IRect {
  int x, y, w, h;

  BBox box() const { return {double(x), double(y), double(w), double(h)}; }
};

struct Wall {
  IRect rect;
  bool vertical;
};

struct Floor {
  std::vector<Wall> walls;
  std::vector<IRect> rooms;
};

struct SizeRange {
  int w_lo, w_hi, h_lo, h_hi;
  bool may_transpose;
};

SizeRange size_range(SymbolClass c) {
  switch (c) {
    case SymbolClass::kDoor: return {28, 48, 28, 48, false};
    case SymbolClass::kBathtub: return {36, 48, 70, 96, true};
    case SymbolClass::kToilet: return {24, 32, 34, 44, true};
    case SymbolClass::kSink: return {28, 44, 22, 32, true};
    case SymbolClass::kWindow: return {40, 90, 12, 16, true};
    case SymbolClass::kStove: return {32, 44, 32, 44, false};
    case SymbolClass::kRefrigerator: return {30, 40, 32, 44, false};
    case SymbolClass::kSofa: return {70, 110, 30, 40, true};
  }
  return {12, 12, 12, 12, false};
}

void split_rooms(const IRect& r, int depth, Rng& rng, Floor& floor) {
  const int t = kWallThickness;
  const bool can_v = r.w >= 2 * kMinRoomSide + t;
  const bool can_h = r.h >= 2 * kMinRoomSide + t;
  if (depth <= 0 || (!can_v && !can_h)) {
    floor.rooms.push_back(r);
    return;
  }
  bool vertical = can_v;
  if (can_v && can_h) {
    vertical = r.w == r.h ? rng.bernoulli(0.5) : r.w > r.h;
  }
  if (vertical) {
    const int sx = static_cast<int>(rng.uniform_int(r.x + kMinRoomSide,
                                                    r.x + r.w - t - kMinRoomSide));
    floor.walls.push_back({{sx, r.y, t, r.h}, true});
    split_rooms({r.x, r.y, sx - r.x, r.h}, depth - 1, rng, floor);
    split_rooms({sx + t, r.y, r.x + r.w - sx - t, r.h}, depth - 1, rng, floor);
  } else {
    const int sy = static_cast<int>(rng.uniform_int(r.y + kMinRoomSide,
                                                    r.y + r.h - t - kMinRoomSide));
    floor.walls.push_back({{r.x, sy, r.w, t}, false});
    split_rooms({r.x, r.y, r.w, sy - r.y}, depth - 1, rng, floor);
    split_rooms({r.x, sy + t, r.w, r.y + r.h - sy - t}, depth - 1, rng, floor);
  }
}

bool overlaps_any(const BBox& b, const std::vector<Annotation>& placed, int gap) {
  const BBox grown{b.x - gap, b.y - gap, b.w + 2.0 * gap, b.h + 2.0 * gap};
  return std::any_of(placed.begin(), placed.end(), [&](const Annotation& a) {
    return intersection_area(grown, a.box) > 0.0;
  });
}

void erase(GrayImage& img, const IRect& r) {
  for (int y = std::max(r.y, 0); y < std::min(r.y + r.h, img.height()); ++y) {
    for (int x = std::max(r.x, 0); x < std::min(r.x + r.w, img.width()); ++x) {
      img.set(x, y, kBackground);
    }
  }
}

// Quarter-circle door swing with the hinge at one corner of the d x d box.
// `corner` 0..3 = top-left, top-right, bottom-right, bottom-left. The open
// leaf runs along the box's horizontal edge when `leaf_horizontal`.
void draw_door(GrayImage& img, const IRect& r, int corner, bool leaf_horizontal) {
  const int d = r.w - 1;
  const int hx = (corner == 1 || corner == 2) ? r.x + d : r.x;
  const int hy = (corner >= 2) ? r.y + d : r.y;
  const int sx = hx == r.x ? 1 : -1;
  const int sy = hy == r.y ? 1 : -1;
  const double start[4] = {0.0, 0.5 * kPi, kPi, 1.5 * kPi};
  draw_into(img, Arc{double(hx), double(hy), double(d), start[corner], 0.5 * kPi, 1.0});
  if (leaf_horizontal) {
    draw_into(img, LineSegment{double(hx), double(hy), double(hx + sx * d), double(hy), 1.0});
  } else {
    draw_into(img, LineSegment{double(hx), double(hy), double(hx), double(hy + sy * d), 1.0});
  }
}

void draw_symbol(GrayImage& img, SymbolClass c, const IRect& r, Rng& rng) {
  const double x = r.x, y = r.y, w = r.w, h = r.h;
  const double x1 = x + w - 1, y1 = y + h - 1;
  const double cx = x + 0.5 * (w - 1), cy = y + 0.5 * (h - 1);
  const bool tall = r.h > r.w;
  switch (c) {
    case SymbolClass::kDoor:
      draw_door(img, r, static_cast<int>(rng.uniform_int(0, 3)), rng.bernoulli(0.5));
      break;
    case SymbolClass::kBathtub: {
      draw_into(img, RectOutline{r.x, r.y, r.w, r.h, 2});
      draw_into(img, RectOutline{r.x + 5, r.y + 5, r.w - 10, r.h - 10, 1});
      const double dx = tall ? cx : x + 0.25 * w;
      const double dy = tall ? y + 0.25 * h : cy;
      draw_into(img, Arc{dx, dy, 3.0});
      break;
    }
    case SymbolClass::kToilet: {
      // Tank along the short side, round bowl beyond it.
      if (tall) {
        const int tank = r.h / 3;
        draw_into(img, RectOutline{r.x, r.y, r.w, tank, 1});
        const double rad = std::min(0.5 * (w - 1), 0.5 * (h - tank - 1));
        draw_into(img, Arc{cx, y1 - rad, rad});
      } else {
        const int tank = r.w / 3;
        draw_into(img, RectOutline{r.x, r.y, tank, r.h, 1});
        const double rad = std::min(0.5 * (h - 1), 0.5 * (w - tank - 1));
        draw_into(img, Arc{x1 - rad, cy, rad});
      }
      break;
    }
    case SymbolClass::kSink: {
      draw_into(img, RectOutline{r.x, r.y, r.w, r.h, 1});
      const double rad = 0.5 * std::min(w, h) - 4.0;
      draw_into(img, Arc{cx, cy, rad});
      if (tall) {
        draw_into(img, LineSegment{x + 2, cy, cx - rad, cy, 1.0});
      } else {
        draw_into(img, LineSegment{cx, y + 2, cx, cy - rad, 1.0});
      }
      break;
    }
    case SymbolClass::kWindow: {
      draw_into(img, RectOutline{r.x, r.y, r.w, r.h, 1});
      if (tall) {
        draw_into(img, LineSegment{cx, y, cx, y1, 1.0});
      } else {
        draw_into(img, LineSegment{x, cy, x1, cy, 1.0});
      }
      break;
    }
    case SymbolClass::kStove: {
      draw_into(img, RectOutline{r.x, r.y, r.w, r.h, 1});
      const double rad = std::min(w, h) / 6.0;
      for (double fx : {0.27, 0.73}) {
        for (double fy : {0.27, 0.73}) {
          draw_into(img, Arc{x + fx * (w - 1), y + fy * (h - 1), rad, 0.0, 2.0 * kPi, 1.0});
        }
      }
      break;
    }
    case SymbolClass::kRefrigerator:
      draw_into(img, RectOutline{r.x, r.y, r.w, r.h, 2});
      draw_into(img, LineSegment{x, y, x1, y1, 1.0});
      draw_into(img, LineSegment{x1, y, x, y1, 1.0});
      break;
    case SymbolClass::kSofa: {
      draw_into(img, RectOutline{r.x, r.y, r.w, r.h, 1});
      const int back = 5;
      const int arm = 8;
      if (tall) {
        draw_into(img, FilledRect{r.x, r.y, back, r.h});
        draw_into(img, RectOutline{r.x, r.y, r.w, arm, 1});
        draw_into(img, RectOutline{r.x, r.y + r.h - arm, r.w, arm, 1});
      } else {
        draw_into(img, FilledRect{r.x, r.y, r.w, back});
        draw_into(img, RectOutline{r.x, r.y, arm, r.h, 1});
        draw_into(img, RectOutline{r.x + r.w - arm, r.y, arm, r.h, 1});
      }
      break;
    }
  }
}

Annotation make_annotation(SymbolClass c, const IRect& r) {
  const int id = static_cast<int>(c);
  return {id, symbol_class_names()[static_cast<std::size_t>(id)], r.box(), false};
}

// One door per interior wall where a collision-free position exists.
void place_doors(const Floor& floor, GrayImage& img, Rng& rng,
                 std::vector<Annotation>& placed) {
  const auto range = size_range(SymbolClass::kDoor);
  const int t = kWallThickness;
  for (std::size_t wi = 0; wi < floor.walls.size(); ++wi) {
    const Wall& wall = floor.walls[wi];
    for (int attempt = 0; attempt < kDoorAttempts; ++attempt) {
      const int d = static_cast<int>(rng.uniform_int(range.w_lo, range.w_hi));
      const int along = wall.vertical ? wall.rect.h : wall.rect.w;
      if (along < d) break;
      const int offset = static_cast<int>(rng.uniform_int(0, along - d));
      const bool positive_side = rng.bernoulli(0.5);
      IRect box{}, gap{};
      if (wall.vertical) {
        const int gy = wall.rect.y + offset;
        box = {positive_side ? wall.rect.x : wall.rect.x + t - d, gy, d, d};
        gap = {wall.rect.x, gy, t, d};
      } else {
        const int gx = wall.rect.x + offset;
        box = {gx, positive_side ? wall.rect.y : wall.rect.y + t - d, d, d};
        gap = {gx, wall.rect.y, d, t};
      }
      const BBox b = box.box();
      bool blocked = overlaps_any(b, placed, kSymbolGap);
      for (std::size_t wj = 0; wj < floor.walls.size() && !blocked; ++wj) {
        if (wj != wi && intersection_area(b, floor.walls[wj].rect.box()) > 0.0) blocked = true;
      }
      if (blocked) continue;
      erase(img, gap);
      // The hinge sits on the wall face the leaf opens away from.
      int corner = 0;
      if (wall.vertical) {
        corner = positive_side ? 0 : 1;
      } else {
        corner = positive_side ? 0 : 3;
      }
      draw_door(img, box, corner, wall.vertical);
      placed.push_back(make_annotation(SymbolClass::kDoor, box));
      break;
    }
  }
}

void place_room_symbols(const Floor& floor, const PlanSpec& spec,
                        const std::vector<SymbolClass>& kinds, GrayImage& img, Rng& rng,
                        std::vector<Annotation>& placed) {
  if (kinds.empty()) return;
  for (const IRect& room : floor.rooms) {
    const IRect usable{room.x + kRoomPadding, room.y + kRoomPadding,
                       room.w - 2 * kRoomPadding, room.h - 2 * kRoomPadding};
    const auto count = rng.uniform_int(spec.density_min, spec.density_max);
    for (std::int64_t s = 0; s < count; ++s) {
      bool done = false;
      for (int attempt = 0; attempt < kMaxPlacementAttempts && !done; ++attempt) {
        // The class is redrawn with the size, so a crowded room falls back to
        // whichever symbols still fit.
        const SymbolClass kind =
            kinds[static_cast<std::size_t>(rng.uniform_int(0, std::int64_t(kinds.size()) - 1))];
        const SizeRange range = size_range(kind);
        int w = static_cast<int>(rng.uniform_int(range.w_lo, range.w_hi));
        int h = static_cast<int>(rng.uniform_int(range.h_lo, range.h_hi));
        if (range.may_transpose && rng.bernoulli(0.5)) std::swap(w, h);
        if (w > usable.w || h > usable.h) continue;
        const IRect r{static_cast<int>(rng.uniform_int(usable.x, usable.x + usable.w - w)),
                      static_cast<int>(rng.uniform_int(usable.y, usable.y + usable.h - h)),
                      w, h};
        if (overlaps_any(r.box(), placed, kSymbolGap)) continue;
        draw_symbol(img, kind, r, rng);
        placed.push_back(make_annotation(kind, r));
        done = true;
      }
      if (!done) {
        throw GenerationError(
            "could not place symbol " + std::to_string(s + 1) + " of " +
            std::to_string(count) + " in the " +
            std::to_string(room.w) + "x" + std::to_string(room.h) + " room at (" +
            std::to_string(room.x) + ", " + std::to_string(room.y) + ") after " +
            std::to_string(kMaxPlacementAttempts) +
            " attempts; lower the symbol density");
      }
    }
  }
}

}  // namespace

const std::vector<std::string>& symbol_class_names() {
  static const std::vector<std::string> names = {
      "door", "bathtub", "toilet", "sink", "window", "stove", "refrigerator", "sofa"};
  return names;
}

std::vector<int> all_symbol_classes() {
  std::vector<int> ids(kNumSymbolClasses);
  for (int i = 0; i < kNumSymbolClasses; ++i) ids[static_cast<std::size_t>(i)] = i;
  return ids;
}

void PlanSpec::validate() const {
  if (width < 512 || height < 512) throw InvalidInput("plan: width and height must be >= 512");
  if (class_set.empty()) throw InvalidInput("plan: class set is empty");
  for (int c : class_set) {
    if (c < 0 || c >= kNumSymbolClasses) {
      throw InvalidInput("plan: unknown symbol class " + std::to_string(c));
    }
  }
  if (room_split_depth < 0) throw InvalidInput("plan: room_split_depth must be >= 0");
  if (density_min < 0 || density_max < density_min) {
    throw InvalidInput("plan: need 0 <= density_min <= density_max");
  }
  if (noise_level < 0 || noise_level > 3) throw InvalidInput("plan: noise_level must be 0..3");
}

GeneratedPlan generate_plan(const PlanSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, "layout"));
  GrayImage img(spec.width, spec.height);

  const int m = kOuterMargin;
  const int t = kWallThickness;
  draw_into(img, RectOutline{m, m, spec.width - 2 * m, spec.height - 2 * m, t});
  const IRect interior{m + t, m + t, spec.width - 2 * (m + t), spec.height - 2 * (m + t)};

  Floor floor;
  split_rooms(interior, spec.room_split_depth, rng, floor);
  for (const auto& wall : floor.walls) {
    draw_into(img, FilledRect{wall.rect.x, wall.rect.y, wall.rect.w, wall.rect.h});
  }

  const auto wants = [&](SymbolClass c) {
    return std::find(spec.class_set.begin(), spec.class_set.end(), static_cast<int>(c)) !=
           spec.class_set.end();
  };
  std::vector<Annotation> placed;
  if (wants(SymbolClass::kDoor)) place_doors(floor, img, rng, placed);

  std::vector<SymbolClass> kinds;
  for (int c = 1; c < kNumSymbolClasses; ++c) {
    if (wants(static_cast<SymbolClass>(c))) kinds.push_back(static_cast<SymbolClass>(c));
  }
  place_room_symbols(floor, spec, kinds, img, rng, placed);

  if (spec.noise_level != 0) {
    img = degrade(img, spec.noise_level, derive_seed(spec.seed, "noise"), spec.degrade);
  }
  return {std::move(img), std::move(placed)};
}

}  // namespace symspot
