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

#include "json.hpp"

namespace symspot {

using Json = nlohmann::ordered_json;

// Rounds to `digits` significant digits so serialized floats stay short and
// stable across runs.
double round_significant(double v, int digits = 6);

Json read_json(const std::filesystem::path& path);
// Pretty-printed with two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace symspot
