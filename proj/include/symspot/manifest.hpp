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

#include <filesystem>
#include <string>
#include <vector>

#include "symspot/annotation.hpp"
#include "symspot/json_io.hpp"

namespace symspot {

struct ManifestImage {
  std::string path;  // relative to the manifest's directory unless absolute
  std::vector<Annotation> annotations;
};

// Dataset manifest: class names (index = class_id) plus per-image annotation
// records in pixel coordinates.
//
//   {"classes": ["door", ...],
//    "images": ["plan_0000.pgm", ...],
//    "annotations": [{"image": "plan_0000.pgm", "class_id": 0,
//                     "x": 10, "y": 12, "w": 40, "h": 40}, ...]}
//
// "images" is optional on input (images are then taken from the annotation
// records). Tile manifests add "ignore": true on ignore regions.
struct Manifest {
  std::vector<std::string> classes;
  std::vector<ManifestImage> images;

  const ManifestImage* find(const std::string& image) const;
};

Json manifest_to_json(const Manifest& m);
Manifest manifest_from_json(const Json& doc);

Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& m);

std::filesystem::path resolve_image(const std::filesystem::path& manifest_path,
                                    const std::string& image);

}  // namespace symspot
