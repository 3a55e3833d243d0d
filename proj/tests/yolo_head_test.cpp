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

#include "symspot/yolo_head.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "symspot/error.hpp"
#include "symspot/random.hpp"

namespace symspot {
namespace {

HeadConfig unit_head() {
  HeadConfig cfg;
  cfg.grid_h = cfg.grid_w = 1;
  cfg.num_classes = 1;
  cfg.anchors = AnchorSet{{{10, 10}}};
  cfg.net_size = 100;
  return cfg;
}

HeadConfig small_head(int classes = 3) {
  HeadConfig cfg;
  cfg.grid_h = cfg.grid_w = 2;
  cfg.num_classes = classes;
  cfg.anchors = AnchorSet{{{20, 20}, {60, 30}}};
  cfg.net_size = 100;
  return cfg;
}

TEST(DecodeTest, AllZerosGivesOneHalfScoreBox) {
  const HeadConfig cfg = unit_head();
  const RawPrediction raw(1, 1, cfg.channels());
  const auto dets = decode(raw, cfg, 0.1);
  ASSERT_EQ(dets.size(), 1u);
  EXPECT_EQ(dets[0].box, (BBox{45, 45, 10, 10}));
  EXPECT_DOUBLE_EQ(dets[0].score, 0.5);
  EXPECT_EQ(dets[0].class_id, 0);
}

TEST(DecodeTest, SuppressedObjectnessGivesNothing) {
  const HeadConfig cfg = small_head();
  RawPrediction raw(2, 2, cfg.channels());
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      for (int a = 0; a < 2; ++a) raw.at(r, c, a * cfg.values_per_anchor() + kTo) = -20;
    }
  }
  EXPECT_TRUE(decode(raw, cfg, 0.01).empty());
}

TEST(DecodeTest, ShapeMismatchThrows) {
  const HeadConfig cfg = small_head();
  EXPECT_THROW(decode(RawPrediction(2, 2, cfg.channels() + 1), cfg, 0.1), InvalidInput);
  EXPECT_THROW(decode(RawPrediction(3, 2, cfg.channels()), cfg, 0.1), InvalidInput);
}

TEST(DecodeTest, ScoreIsMonotoneInObjectness) {
  const HeadConfig cfg = unit_head();
  double last = -1;
  for (double to = -10; to <= 10; to += 0.5) {
    RawPrediction raw(1, 1, cfg.channels());
    raw.at(0, 0, kTo) = to;
    const auto dets = decode(raw, cfg, 0.0);
    ASSERT_EQ(dets.size(), 1u);
    EXPECT_GT(dets[0].score, last);
    last = dets[0].score;
  }
}

TEST(EncodeTest, InverseOfTheDecodeExample) {
  const HeadConfig cfg = unit_head();
  const std::vector<Detection> dets = {{0, BBox::from_center(50, 50, 10, 10), 0.5}};
  const RawPrediction raw = encode_detections(dets, cfg);
  for (int ch = kTx; ch <= kTo; ++ch) EXPECT_NEAR(raw.at(0, 0, ch), 0.0, 1e-12) << ch;
  EXPECT_EQ(raw.at(0, 0, kClass0), kClassLogitMargin);
}

TEST(EncodeTest, EmptyListFillsEmptyObjectness) {
  const HeadConfig cfg = small_head();
  const RawPrediction raw = encode_detections(std::vector<Detection>{}, cfg);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      for (int ch = 0; ch < cfg.channels(); ++ch) {
        const double expected = ch % cfg.values_per_anchor() == kTo ? kEmptyObjectness : 0.0;
        EXPECT_EQ(raw.at(r, c, ch), expected);
      }
    }
  }
}

TEST(EncodeTest, SlotCollisionThrows) {
  const HeadConfig cfg = unit_head();
  const Detection d{0, BBox::from_center(50, 50, 10, 10), 0.5};
  const std::vector<Detection> dets = {d, d};
  EXPECT_THROW(encode_detections(dets, cfg), CapacityError);
}

TEST(EncodeTest, InvalidDetectionsThrow) {
  const HeadConfig cfg = unit_head();
  const std::vector<Detection> outside = {{0, BBox::from_center(100, 50, 10, 10), 0.5}};
  EXPECT_THROW(encode_detections(outside, cfg), InvalidInput);
  const std::vector<Detection> certain = {{0, BBox::from_center(50, 50, 10, 10), 1.0}};
  EXPECT_THROW(encode_detections(certain, cfg), InvalidInput);
}

TEST(EncodeTest, RoundTripRecoversDetections) {
  const HeadConfig cfg = small_head();
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Detection> dets;
    // One detection per cell keeps slots distinct.
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        if (rng.bernoulli(0.3)) continue;
        const double cx = (c + rng.uniform(0.01, 0.99)) * 50;
        const double cy = (r + rng.uniform(0.01, 0.99)) * 50;
        dets.push_back({int(rng.uniform_int(0, 2)),
                        BBox::from_center(cx, cy, rng.uniform(5, 90), rng.uniform(5, 90)),
                        rng.uniform(0.3, 0.99)});
      }
    }
    const auto out = decode(encode_detections(dets, cfg), cfg, 0.2);
    ASSERT_EQ(out.size(), dets.size());
    for (const auto& d : dets) {
      bool found = false;
      for (const auto& o : out) {
        if (o.class_id == d.class_id && std::abs(o.box.x - d.box.x) < 1e-6 &&
            std::abs(o.box.y - d.box.y) < 1e-6 && std::abs(o.box.w - d.box.w) < 1e-6 &&
            std::abs(o.box.h - d.box.h) < 1e-6 && std::abs(o.score - d.score) < 1e-6) {
          found = true;
        }
      }
      EXPECT_TRUE(found);
    }
  }
}

TEST(AssignSlotTest, PicksCellAndBestPrior) {
  const HeadConfig cfg = small_head();
  EXPECT_EQ(assign_slot(75, 10, 58, 31, cfg), (Slot{0, 1, 1}));
  EXPECT_EQ(assign_slot(10, 60, 18, 22, cfg), (Slot{1, 0, 0}));
}

TEST(LossTest, EmptyTruthWithSuppressedObjectnessIsNearZero) {
  const HeadConfig cfg = small_head();
  const RawPrediction raw = encode_detections(std::vector<Detection>{}, cfg);
  const auto result = loss_and_grad(raw, std::vector<Annotation>{}, cfg);
  EXPECT_LT(result.loss(), 1e-8 * 8);
  EXPECT_GE(result.loss(), 0.0);
}

TEST(LossTest, PerfectPredictionHasZeroCoordAndClassTerms) {
  const HeadConfig cfg = small_head();
  const std::vector<Annotation> truth = {{1, "b", {30, 5, 40, 30}, false},
                                         {2, "c", {55, 55, 20, 25}, false}};
  std::vector<Detection> dets;
  for (const auto& t : truth) dets.push_back({t.class_id, t.box, 1.0 - 1e-12});
  const auto result = loss_and_grad(encode_detections(dets, cfg), truth, cfg);
  EXPECT_NEAR(result.terms.coord, 0.0, 1e-9);
  EXPECT_NEAR(result.terms.cls, 0.0, 1e-9);
  EXPECT_NEAR(result.terms.obj, 0.0, 1e-9);
}

TEST(LossTest, ShapeMismatchThrows) {
  const HeadConfig cfg = small_head();
  EXPECT_THROW(loss_and_grad(RawPrediction(1, 1, cfg.channels()), {}, cfg), InvalidInput);
}

TEST(LossTest, IgnoreRegionMasksBackgroundTerm) {
  const HeadConfig cfg = unit_head();
  RawPrediction raw(1, 1, cfg.channels());
  raw.at(0, 0, kTo) = 2.0;
  const auto open = loss_and_grad(raw, std::vector<Annotation>{}, cfg);
  EXPECT_GT(open.terms.noobj, 0.0);
  const std::vector<Annotation> ignore = {{0, "x", {30, 30, 40, 40}, true}};
  const auto masked = loss_and_grad(raw, ignore, cfg);
  EXPECT_EQ(masked.terms.noobj, 0.0);
  EXPECT_EQ(masked.loss(), 0.0);
}

TEST(LossTest, GradientMatchesFiniteDifferences) {
  const HeadConfig cfg = small_head();
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    RawPrediction raw(2, 2, cfg.channels());
    for (auto& v : raw.values()) v = rng.uniform(-2, 2);
    std::vector<Annotation> truth;
    const int n = int(rng.uniform_int(0, 3));
    for (int i = 0; i < n; ++i) {
      const double w = rng.uniform(8, 60), h = rng.uniform(8, 60);
      truth.push_back({int(rng.uniform_int(0, 2)), "",
                       {rng.uniform(0, 100 - w), rng.uniform(0, 100 - h), w, h},
                       rng.bernoulli(0.2)});
    }
    const auto result = loss_and_grad(raw, truth, cfg);
    const auto f = [&](const std::vector<double>& x) {
      RawPrediction r(2, 2, cfg.channels());
      std::copy(x.begin(), x.end(), r.values().begin());
      return loss_and_grad(r, truth, cfg).loss();
    };
    const std::vector<double> x(raw.values().begin(), raw.values().end());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double numeric = oracle::central_difference(f, x, i, 1e-4);
      const double analytic = result.grad.values()[i];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      ASSERT_LT(std::abs(numeric - analytic) / denom, 1e-4)
          << "trial " << trial << " entry " << i << " analytic " << analytic << " numeric "
          << numeric;
    }
  }
}

}  // namespace
}  // namespace symspot
