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

#include "symspot/backend.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "symspot/error.hpp"
#include "symspot/random.hpp"
#include "symspot/tiler.hpp"

namespace symspot {
namespace {

constexpr char kMagic[] = "RPRD1\n";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;
constexpr std::size_t kMaxHeaderLen = 64;

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

// Smallest spurious box an oracle emits, in network pixels.
constexpr double kMinSpuriousSide = 12.0;

}  // namespace

void OracleConfig::validate() const {
  if (drop_prob < 0.0 || drop_prob > 1.0) {
    throw InvalidInput("oracle: drop_prob must lie in [0, 1]");
  }
  if (jitter_sigma < 0.0) throw InvalidInput("oracle: jitter_sigma must be >= 0");
  if (!(score_low > 0.0 && score_low <= score_high && score_high < 1.0)) {
    throw InvalidInput("oracle: need 0 < score_low <= score_high < 1");
  }
  if (false_positive_rate < 0.0) {
    throw InvalidInput("oracle: false_positive_rate must be >= 0");
  }
}

RawPrediction oracle_predict(const std::vector<Annotation>& tile_truth,
                             const HeadConfig& cfg, const OracleConfig& ocfg,
                             const std::string& stream_key) {
  cfg.validate();
  ocfg.validate();
  Rng rng(derive_seed(ocfg.seed, stream_key));
  const double n = cfg.net_size;
  const double max_center = std::nextafter(n, 0.0);

  std::vector<Detection> candidates;
  for (const auto& t : tile_truth) {
    if (t.ignore) continue;
    // Every symbol consumes the same number of draws whether or not it is
    // dropped, so one symbol's fate does not shift another's noise.
    const bool dropped = rng.uniform() < ocfg.drop_prob;
    const double noise[4] = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    const double score = rng.uniform(ocfg.score_low, ocfg.score_high);
    if (dropped) continue;
    const double s = ocfg.jitter_sigma;
    BBox box = t.box;
    if (s > 0.0) {
      const double cx = std::clamp(t.box.center_x() + s * noise[0], 0.0, max_center);
      const double cy = std::clamp(t.box.center_y() + s * noise[1], 0.0, max_center);
      const double w = std::max(1.0, t.box.w + s * noise[2]);
      const double h = std::max(1.0, t.box.h + s * noise[3]);
      box = BBox::from_center(cx, cy, w, h);
    }
    candidates.push_back({t.class_id, box, score});
  }

  const auto spurious = rng.poisson(ocfg.false_positive_rate);
  const double max_side = std::max(kMinSpuriousSide, 0.5 * n);
  for (std::int64_t i = 0; i < spurious; ++i) {
    const double cx = std::min(rng.uniform(0.0, n), max_center);
    const double cy = std::min(rng.uniform(0.0, n), max_center);
    const double w = rng.uniform(kMinSpuriousSide, max_side);
    const double h = rng.uniform(kMinSpuriousSide, max_side);
    const int cls = static_cast<int>(rng.uniform_int(0, cfg.num_classes - 1));
    const double score = rng.uniform(ocfg.score_low, ocfg.score_high);
    candidates.push_back({cls, BBox::from_center(cx, cy, w, h), score});
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Detection& a, const Detection& b) { return a.score > b.score; });
  std::set<Slot> used;
  std::vector<Detection> kept;
  for (const auto& d : candidates) {
    const Slot s = assign_slot(d.box.center_x(), d.box.center_y(), d.box.w, d.box.h, cfg);
    if (used.insert(s).second) kept.push_back(d);
  }
  return encode_detections(kept, cfg);
}

void write_rawpred(const std::filesystem::path& path, const RawPrediction& raw) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << kMagic << raw.grid_h() << ' ' << raw.grid_w() << ' ' << raw.channels() << '\n';
  std::vector<char> buf(raw.values().size() * 4);
  for (std::size_t i = 0; i < raw.values().size(); ++i) {
    const float f = static_cast<float>(raw.values()[i]);
    const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(f));
    std::memcpy(buf.data() + 4 * i, &bits, 4);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

RawPrediction read_rawpred(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string where = " in " + path.string();

  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (in.gcount() != static_cast<std::streamsize>(kMagicLen) ||
      std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw FormatError("missing RPRD1 magic" + where);
  }
  std::string header;
  for (char c; header.size() <= kMaxHeaderLen && in.get(c) && c != '\n';) header.push_back(c);
  if (header.size() > kMaxHeaderLen || !in) throw FormatError("unterminated header" + where);

  std::istringstream fields(header);
  long long dims[3] = {0, 0, 0};
  std::string trailing;
  if (!(fields >> dims[0] >> dims[1] >> dims[2]) || (fields >> trailing) ||
      dims[0] < 1 || dims[1] < 1 || dims[2] < 1) {
    throw FormatError("malformed header '" + header + "'" + where);
  }
  RawPrediction raw(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                    static_cast<int>(dims[2]));
  std::vector<char> buf(raw.values().size() * 4);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw FormatError("tensor payload shorter than the header's " + header + where);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after the tensor payload" + where);
  }
  for (std::size_t i = 0; i < raw.values().size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, buf.data() + 4 * i, 4);
    const float f = std::bit_cast<float>(to_little_endian(bits));
    if (!std::isfinite(f)) {
      throw FormatError("non-finite value at index " + std::to_string(i) + where);
    }
    raw.values()[i] = f;
  }
  return raw;
}

RawPrediction file_backend_read(const std::string& tile_id,
                                const std::filesystem::path& directory,
                                const HeadConfig& cfg) {
  const auto path = directory / (tile_id + ".rawpred");
  if (!std::filesystem::exists(path)) {
    throw NotFound("no prediction for tile " + tile_id + " (expected " + path.string() + ")");
  }
  RawPrediction raw = read_rawpred(path);
  if (raw.grid_h() != cfg.grid_h || raw.grid_w() != cfg.grid_w ||
      raw.channels() != cfg.channels()) {
    throw FormatError("tile " + tile_id + ": expected dims " + std::to_string(cfg.grid_h) +
                      " " + std::to_string(cfg.grid_w) + " " +
                      std::to_string(cfg.channels()) + ", found " +
                      std::to_string(raw.grid_h()) + " " + std::to_string(raw.grid_w()) +
                      " " + std::to_string(raw.channels()));
  }
  return raw;
}

OracleBackend::OracleBackend(std::map<std::string, std::vector<Annotation>> truth,
                             HeadConfig head, OracleConfig oracle)
    : head_(std::move(head)), oracle_(oracle) {
  head_.validate();
  oracle_.validate();
  // A symbol the detector misses is missed in every tile that shows it, so
  // drops are decided once per plan symbol. Deciding per tile would let the
  // overlapping tiles recover almost every dropped symbol after merging.
  for (auto& [image, anns] : truth) {
    auto& kept = truth_[image];
    for (std::size_t i = 0; i < anns.size(); ++i) {
      Rng rng(derive_seed(oracle_.seed, "drop:" + image + ":" + std::to_string(i)));
      if (anns[i].ignore || rng.uniform() >= oracle_.drop_prob) kept.push_back(anns[i]);
    }
  }
  oracle_.drop_prob = 0.0;
}

RawPrediction OracleBackend::predict(const TileQuery& query) const {
  std::vector<Annotation> tile_truth;
  if (const auto it = truth_.find(query.image); it != truth_.end()) {
    tile_truth = tile_annotations(it->second, query.frame);
  }
  return oracle_predict(tile_truth, head_, oracle_, query.tile_id);
}

FileBackend::FileBackend(std::filesystem::path directory, HeadConfig head)
    : directory_(std::move(directory)), head_(std::move(head)) {
  head_.validate();
}

RawPrediction FileBackend::predict(const TileQuery& query) const {
  return file_backend_read(query.tile_id, directory_, head_);
}

}  // namespace symspot
