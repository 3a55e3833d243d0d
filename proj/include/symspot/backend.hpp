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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "symspot/annotation.hpp"
#include "symspot/yolo_head.hpp"

namespace symspot {

// Noise model of the oracle detector.
struct OracleConfig {
  double drop_prob = 0.0;            // chance a truth symbol is omitted
  double jitter_sigma = 0.0;         // Gaussian noise on centre and size, pixels
  double score_low = 0.6;            // emitted scores are uniform in
  double score_high = 0.95;          //   [score_low, score_high]
  double false_positive_rate = 0.0;  // expected spurious boxes per tile
  std::uint64_t seed = 0;

  void validate() const;
};

// Fabricates a prediction tensor from the truth of one tile (network
// coordinates). Ignore regions are not emitted. The random stream is derived
// from (ocfg.seed, stream_key), so per-tile results do not depend on call
// order. Slot collisions keep the higher-scoring claimant.
RawPrediction oracle_predict(const std::vector<Annotation>& tile_truth,
                             const HeadConfig& cfg, const OracleConfig& ocfg,
                             const std::string& stream_key = {});

// ".rawpred" tensor exchange format: the magic line "RPRD1", an ASCII line
// "grid_h grid_w channels", then grid_h * grid_w * channels little-endian
// IEEE-754 float32 values, row-major.
void write_rawpred(const std::filesystem::path& path, const RawPrediction& raw);
RawPrediction read_rawpred(const std::filesystem::path& path);

// Reads "<directory>/<tile_id>.rawpred" and checks its shape against `cfg`.
// Throws NotFound for a missing file and FormatError for a malformed one.
RawPrediction file_backend_read(const std::string& tile_id,
                                const std::filesystem::path& directory,
                                const HeadConfig& cfg);

// What a backend is told about the tile it must predict.
struct TileQuery {
  std::string image;    // manifest image key
  std::string tile_id;
  TileFrame frame;
};

// Detector seam: one raw prediction per tile. Implementations must be safe to
// call concurrently.
class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;
  virtual RawPrediction predict(const TileQuery& query) const = 0;
};

class OracleBackend final : public DetectorBackend {
 public:
  // `truth` maps image keys to plan-space annotations. drop_prob applies per
  // plan symbol: a dropped symbol is absent from every tile.
  OracleBackend(std::map<std::string, std::vector<Annotation>> truth, HeadConfig head,
                OracleConfig oracle);
  RawPrediction predict(const TileQuery& query) const override;

 private:
  std::map<std::string, std::vector<Annotation>> truth_;
  HeadConfig head_;
  OracleConfig oracle_;
};

class FileBackend final : public DetectorBackend {
 public:
  FileBackend(std::filesystem::path directory, HeadConfig head);
  RawPrediction predict(const TileQuery& query) const override;

 private:
  std::filesystem::path directory_;
  HeadConfig head_;
};

}  // namespace symspot
