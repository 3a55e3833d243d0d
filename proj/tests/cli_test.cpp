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

#include "cli/commands.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/config.hpp"
#include "symspot/backend.hpp"
#include "symspot/json_io.hpp"
#include "symspot/manifest.hpp"

namespace symspot::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "symspot");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("symspot_cli_" + std::string(::testing::UnitTest::GetInstance()
                                              ->current_test_info()
                                              ->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  std::string path(const std::string& rel) const { return (root_ / rel).string(); }
  void synth(int count = 2) {
    const auto r = invoke({"synth", "--out", path("corpus"), "--count", std::to_string(count),
                           "--width", "600", "--height", "600", "--seed", "3"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  fs::path root_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(invoke({"synth", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
}

TEST_F(CliTest, SynthWritesCorpusAndConfigEcho) {
  synth();
  EXPECT_TRUE(fs::exists(path("corpus/plan_0000.pgm")));
  EXPECT_TRUE(fs::exists(path("corpus/plan_0001.pgm")));
  EXPECT_TRUE(fs::exists(path("corpus/config.resolved.json")));
  const Manifest m = load_manifest(path("corpus/manifest.json"));
  EXPECT_EQ(m.images.size(), 2u);
  EXPECT_EQ(m.classes.size(), 8u);
}

TEST_F(CliTest, FileBackendWithoutAnchorsFails) {
  synth(1);
  const auto r = invoke({"detect", "--manifest", path("corpus/manifest.json"), "--backend",
                         "file", "--rawpred-dir", path("corpus"), "--out", path("d")});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("anchors"), std::string::npos);
}

TEST_F(CliTest, NoiselessDetectReproducesTheManifest) {
  synth();
  const auto det = invoke({"detect", "--manifest", path("corpus/manifest.json"), "--out",
                           path("detect"), "--jobs", "3"});
  ASSERT_EQ(det.code, kExitOk) << det.err;
  const Json records = read_json(path("detect/detections.json"));
  const Manifest m = load_manifest(path("corpus/manifest.json"));
  std::size_t truths = 0;
  for (const auto& img : m.images) truths += img.annotations.size();
  EXPECT_EQ(records.size(), truths);
  for (const auto& r : records) {
    const auto* img = m.find(r["image"].get<std::string>());
    ASSERT_NE(img, nullptr);
    const BBox b{r["x"].get<double>(), r["y"].get<double>(), r["w"].get<double>(),
                 r["h"].get<double>()};
    bool found = false;
    for (const auto& a : img->annotations) {
      found = found || (a.class_id == r["class_id"].get<int>() && iou(a.box, b) > 1 - 1e-6);
    }
    EXPECT_TRUE(found);
  }

  const auto ev = invoke({"eval", "--manifest", path("corpus/manifest.json"), "--detections",
                          path("detect/detections.json"), "--out", path("eval")});
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  const Json report = read_json(path("eval/report.json"));
  EXPECT_EQ(report["aggregate"]["AP50"].get<double>(), 1.0);
  EXPECT_EQ(report["instance"]["f_score"].get<double>(), 1.0);
  EXPECT_TRUE(fs::exists(path("eval/report.txt")));
}

TEST_F(CliTest, ConfigEchoReproducesTheRun) {
  synth(1);
  ASSERT_EQ(invoke({"detect", "--manifest", path("corpus/manifest.json"), "--out",
                    path("a"), "--stride", "60"})
                .code,
            kExitOk);
  const std::string echo = path("a/config.resolved.json");
  EXPECT_EQ(read_json(echo)["tiling"]["stride"].get<int>(), 60);
  ASSERT_EQ(invoke({"detect", "--config", echo, "--out", path("b")}).code, kExitOk);
  EXPECT_EQ(slurp(path("a/detections.json")), slurp(path("b/detections.json")));
}

TEST_F(CliTest, FileBackendWithEmptyDirectoryFails) {
  synth(1);
  ASSERT_EQ(invoke({"anchors", "--manifest", path("corpus/manifest.json"), "--out",
                    path("anchors")})
                .code,
            kExitOk);
  fs::create_directories(path("empty"));
  const auto r = invoke({"detect", "--manifest", path("corpus/manifest.json"), "--backend",
                         "file", "--rawpred-dir", path("empty"), "--anchors",
                         path("anchors/anchors.json"), "--out", path("d")});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("no prediction for tile"), std::string::npos) << r.err;
}

TEST_F(CliTest, FileBackendConsumesOracleTensors) {
  synth(1);
  ASSERT_EQ(invoke({"anchors", "--manifest", path("corpus/manifest.json"), "--out",
                    path("anchors")})
                .code,
            kExitOk);
  ASSERT_EQ(invoke({"prepare-tiles", "--inference", "--manifest",
                    path("corpus/manifest.json"), "--out", path("tiles")})
                .code,
            kExitOk);
  // Stand in for a trained network: oracle tensors written to .rawpred files.
  const PipelineConfig cfg = load_config(path("anchors/config.resolved.json"));
  HeadConfig head = cfg.head;
  head.num_classes = 8;
  const Manifest tiles = load_manifest(path("tiles/manifest.json"));
  fs::create_directories(path("raw"));
  for (const auto& t : tiles.images) {
    const std::string id = fs::path(t.path).stem().string();
    write_rawpred(path("raw/" + id + ".rawpred"), oracle_predict(t.annotations, head, {}));
  }
  const auto r = invoke({"detect", "--manifest", path("corpus/manifest.json"), "--backend",
                         "file", "--rawpred-dir", path("raw"), "--anchors",
                         path("anchors/anchors.json"), "--out", path("d")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  ASSERT_EQ(invoke({"eval", "--manifest", path("corpus/manifest.json"), "--detections",
                    path("d/detections.json"), "--out", path("e")})
                .code,
            kExitOk);
  EXPECT_EQ(read_json(path("e/report.json"))["instance"]["f_score"].get<double>(), 1.0);
}

TEST_F(CliTest, TrainingTilesKeepOnlyTilesWithSymbols) {
  synth(1);
  ASSERT_EQ(invoke({"prepare-tiles", "--manifest", path("corpus/manifest.json"), "--out",
                    path("tiles")})
                .code,
            kExitOk);
  const Manifest tiles = load_manifest(path("tiles/manifest.json"));
  ASSERT_FALSE(tiles.images.empty());
  for (const auto& t : tiles.images) {
    EXPECT_TRUE(fs::exists(path("tiles/" + t.path)));
    bool real = false;
    for (const auto& a : t.annotations) real = real || !a.ignore;
    EXPECT_TRUE(real);
  }
}

TEST_F(CliTest, UnknownConfigKeyIsRejected) {
  std::ofstream(path("bad.json")) << R"({"tilling": {"stride": 10}})";
  const auto r = invoke({"synth", "--config", path("bad.json"), "--out", path("x")});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("tilling"), std::string::npos);
}

TEST_F(CliTest, SelftestPasses) {
  const auto r = invoke({"selftest", "--out", path("st"), "--count", "2", "--seed", "1"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_EQ(r.out.find("[FAIL]"), std::string::npos);
}

}  // namespace
}  // namespace symspot::cli
