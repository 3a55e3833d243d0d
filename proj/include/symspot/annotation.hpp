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

#include "symspot/geometry.hpp"

namespace symspot {

// Class-labelled ground-truth box. Ignore regions mark symbols that are only
// partly visible in a tile; they are masked in the loss and in metrics.
struct Annotation {
  int class_id = 0;
  std::string class_name;
  BBox box;
  bool ignore = false;

  bool operator==(const Annotation&) const = default;
};

// Detector output: a class-labelled box with a confidence score in [0, 1].
struct Detection {
  int class_id = 0;
  BBox box;
  double score = 0.0;

  bool operator==(const Detection&) const = default;
};

}  // namespace symspot
