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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "symspot/error.hpp"
#include "symspot/random.hpp"
#include "symspot/tiler.hpp"

namespace symspot {
namespace {

namespace fs = std::filesystem;

HeadConfig head() {
  HeadConfig cfg;
  cfg.num_classes = 3;
  cfg.anchors = AnchorSet{{{20, 20}, {40, 40}, {80, 50}}};
  return cfg;
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "symspot_backend_test";
  fs::create_directories(dir);
  return dir;
}

TEST(OracleTest, NoiselessOracleReturnsTheTruth) {
  const HeadConfig cfg = head();
  const std::vector<Annotation> truth = {{2, "c", {10, 20, 40, 30}, false}};
  const auto dets = decode(oracle_predict(truth, cfg, {}), cfg, 0.25);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].class_id, 2);
  EXPECT_NEAR(dets[0].box.x, 10, 1e-9);
  EXPECT_NEAR(dets[0].box.y, 20, 1e-9);
  EXPECT_NEAR(dets[0].box.w, 40, 1e-9);
  EXPECT_NEAR(dets[0].box.h, 30, 1e-9);
}

TEST(OracleTest, IgnoreRegionsAreNotEmitted) {
  const HeadConfig cfg = head();
  const std::vector<Annotation> truth = {{2, "c", {10, 20, 40, 30}, true}};
  EXPECT_TRUE(decode(oracle_predict(truth, cfg, {}), cfg, 0.01).empty());
}

TEST(OracleTest, DropEverything) {
  const HeadConfig cfg = head();
  OracleConfig ocfg;
  ocfg.drop_prob = 1.0;
  const std::vector<Annotation> truth = {{0, "", {10, 20, 40, 30}, false},
                                         {1, "", {120, 120, 40, 30}, false}};
  EXPECT_TRUE(decode(oracle_predict(truth, cfg, ocfg), cfg, 1e-6).empty());
}

TEST(OracleTest, JitterHasHalfNormalDisplacement) {
  const HeadConfig cfg = head();
  OracleConfig ocfg;
  ocfg.jitter_sigma = 2.0;
  const std::vector<Annotation> truth = {{0, "", {90, 90, 40, 40}, false}};
  double sum = 0;
  int count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    ocfg.seed = static_cast<std::uint64_t>(trial);
    const auto dets = decode(oracle_predict(truth, cfg, ocfg), cfg, 0.25);
    ASSERT_EQ(dets.size(), 1u);
    sum += std::abs(dets[0].box.center_x() - 110);
    sum += std::abs(dets[0].box.center_y() - 110);
    count += 2;
  }
  const double expected = 2.0 * std::sqrt(2.0 / M_PI);
  EXPECT_NEAR(sum / count, expected, 0.1 * expected);
}

TEST(OracleTest, DeterministicPerStreamKey) {
  const HeadConfig cfg = head();
  OracleConfig ocfg;
  ocfg.jitter_sigma = 3;
  ocfg.false_positive_rate = 2;
  ocfg.seed = 5;
  const std::vector<Annotation> truth = {{0, "", {50, 50, 30, 30}, false}};
  EXPECT_EQ(oracle_predict(truth, cfg, ocfg, "a"), oracle_predict(truth, cfg, ocfg, "a"));
  EXPECT_NE(oracle_predict(truth, cfg, ocfg, "a"), oracle_predict(truth, cfg, ocfg, "b"));
}

TEST(OracleTest, CollisionKeepsHigherScore) {
  HeadConfig cfg = head();
  cfg.num_classes = 1;
  const std::vector<Annotation> truth = {{0, "", {10, 10, 20, 20}, false},
                                         {0, "", {11, 11, 20, 20}, false}};
  const auto dets = decode(oracle_predict(truth, cfg, {}), cfg, 0.25);
  EXPECT_EQ(dets.size(), 1u);
}

TEST(OracleTest, ConfigValidation) {
  OracleConfig ocfg;
  ocfg.score_low = 0.9;
  ocfg.score_high = 0.5;
  EXPECT_THROW(ocfg.validate(), InvalidInput);
  ocfg = {};
  ocfg.drop_prob = 1.5;
  EXPECT_THROW(ocfg.validate(), InvalidInput);
}

TEST(RawpredTest, WriteThenReadIsBitIdentical) {
  Rng rng(3);
  RawPrediction raw(7, 7, 24);
  // float32-representable values survive unchanged.
  for (auto& v : raw.values()) v = static_cast<float>(rng.uniform(-30, 30));
  const auto path = temp_dir() / "t.rawpred";
  write_rawpred(path, raw);
  EXPECT_EQ(read_rawpred(path), raw);
  EXPECT_EQ(fs::file_size(path), 6u + 7u + 7u * 7u * 24u * 4u);
}

TEST(RawpredTest, EncodedDetectionsSurviveTheFile) {
  const HeadConfig cfg = head();
  const std::vector<Detection> dets = {{1, {10.25, 20.5, 40, 30}, 0.8},
                                       {2, {150, 100, 70, 45}, 0.6}};
  const auto dir = temp_dir();
  write_rawpred(dir / "tile_a.rawpred", encode_detections(dets, cfg));
  const auto out = decode(file_backend_read("tile_a", dir, cfg), cfg, 0.25);
  ASSERT_EQ(out.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& d = dets[i];
    const auto& o = out[i].class_id == d.class_id ? out[i] : out[1 - i];
    EXPECT_EQ(o.class_id, d.class_id);
    // float32 storage: centres and scores are absolute, sizes relative.
    EXPECT_NEAR(o.box.center_x(), d.box.center_x(), 1e-6);
    EXPECT_NEAR(o.box.center_y(), d.box.center_y(), 1e-6);
    EXPECT_NEAR(o.box.w / d.box.w, 1.0, 1e-6);
    EXPECT_NEAR(o.box.h / d.box.h, 1.0, 1e-6);
    EXPECT_NEAR(o.score, d.score, 1e-6);
  }
}

TEST(RawpredTest, MissingFileNamesTheTile) {
  try {
    file_backend_read("nope_x0_y0", temp_dir(), head());
    FAIL() << "expected NotFound";
  } catch (const NotFound& e) {
    EXPECT_NE(std::string(e.what()).find("nope_x0_y0"), std::string::npos);
  }
}

TEST(RawpredTest, WrongChannelCountIsFormatError) {
  const HeadConfig cfg = head();
  const auto dir = temp_dir();
  write_rawpred(dir / "bad.rawpred", RawPrediction(7, 7, cfg.channels() + 1));
  try {
    file_backend_read("bad", dir, cfg);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("expected"), std::string::npos);
  }
}

TEST(RawpredTest, CorruptFilesAreFormatErrors) {
  const auto path = temp_dir() / "corrupt.rawpred";
  {
    std::ofstream out(path, std::ios::binary);
    out << "RPRD1\n1 1 2\n" << "abc";
  }
  EXPECT_THROW(read_rawpred(path), FormatError);
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE\n1 1 1\n" << "abcd";
  }
  EXPECT_THROW(read_rawpred(path), FormatError);
  {
    std::ofstream out(path, std::ios::binary);
    const float nan = std::numeric_limits<float>::quiet_NaN();
    out << "RPRD1\n1 1 1\n";
    out.write(reinterpret_cast<const char*>(&nan), sizeof nan);
  }
  EXPECT_THROW(read_rawpred(path), FormatError);
}

TEST(BackendTest, OracleBackendUsesPlanTruth) {
  HeadConfig cfg = head();
  std::map<std::string, std::vector<Annotation>> truth;
  truth["plan"] = {{1, "", {300, 310, 40, 30}, false}};
  const OracleBackend backend(truth, cfg, {});
  const TileFrame frame{250, 250, 227, 227};
  const auto dets = decode(backend.predict({"plan", "plan_x250_y250", frame}), cfg, 0.25);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_NEAR(tile_to_plan(dets[0].box, frame).x, 300, 1e-9);
  EXPECT_TRUE(decode(backend.predict({"other", "other_x0_y0", frame}), cfg, 0.01).empty());
}

}  // namespace
}  // namespace symspot
