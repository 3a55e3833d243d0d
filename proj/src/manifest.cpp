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

#include "symspot/manifest.hpp"

#include <map>

#include "symspot/error.hpp"

namespace symspot {

const ManifestImage* Manifest::find(const std::string& image) const {
  for (const auto& img : images) {
    if (img.path == image) return &img;
  }
  return nullptr;
}

Json manifest_to_json(const Manifest& m) {
  Json doc;
  doc["classes"] = m.classes;
  Json images = Json::array();
  Json anns = Json::array();
  for (const auto& img : m.images) {
    images.push_back(img.path);
    for (const auto& a : img.annotations) {
      Json rec;
      rec["image"] = img.path;
      rec["class_id"] = a.class_id;
      rec["x"] = round_significant(a.box.x);
      rec["y"] = round_significant(a.box.y);
      rec["w"] = round_significant(a.box.w);
      rec["h"] = round_significant(a.box.h);
      if (a.ignore) rec["ignore"] = true;
      anns.push_back(std::move(rec));
    }
  }
  doc["images"] = std::move(images);
  doc["annotations"] = std::move(anns);
  return doc;
}

Manifest manifest_from_json(const Json& doc) {
  Manifest m;
  try {
    m.classes = doc.at("classes").get<std::vector<std::string>>();
    std::map<std::string, std::size_t> index;
    const auto image_slot = [&](const std::string& path) -> ManifestImage& {
      auto it = index.find(path);
      if (it == index.end()) {
        it = index.emplace(path, m.images.size()).first;
        m.images.push_back({path, {}});
      }
      return m.images[it->second];
    };
    if (doc.contains("images")) {
      for (const auto& p : doc.at("images")) image_slot(p.get<std::string>());
    }
    const auto& records = doc.at("annotations");
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      Annotation a;
      a.class_id = r.at("class_id").get<int>();
      if (a.class_id < 0 || a.class_id >= static_cast<int>(m.classes.size())) {
        throw FormatError("annotation #" + std::to_string(i) +
                          " has unknown class_id " + std::to_string(a.class_id));
      }
      a.class_name = m.classes[static_cast<std::size_t>(a.class_id)];
      a.box = {r.at("x").get<double>(), r.at("y").get<double>(),
               r.at("w").get<double>(), r.at("h").get<double>()};
      if (!a.box.valid()) {
        throw FormatError("annotation #" + std::to_string(i) +
                          " has a degenerate box " + to_string(a.box));
      }
      a.ignore = r.value("ignore", false);
      image_slot(r.at("image").get<std::string>()).annotations.push_back(std::move(a));
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  try {
    return manifest_from_json(read_json(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  write_json(path, manifest_to_json(m));
}

std::filesystem::path resolve_image(const std::filesystem::path& manifest_path,
                                    const std::string& image) {
  const std::filesystem::path p(image);
  if (p.is_absolute()) return p;
  return manifest_path.parent_path() / p;
}

}  // namespace symspot
