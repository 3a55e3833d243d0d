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

#include <span>
#include <vector>

#include "symspot/anchors.hpp"
#include "symspot/annotation.hpp"

namespace symspot {

struct HeadConfig {
  int grid_h = 7;
  int grid_w = 7;
  int num_classes = 1;
  AnchorSet anchors;
  double net_size = 227.0;

  int num_anchors() const { return static_cast<int>(anchors.size()); }
  int values_per_anchor() const { return 5 + num_classes; }
  int channels() const { return num_anchors() * values_per_anchor(); }
  double cell_w() const { return net_size / grid_w; }
  double cell_h() const { return net_size / grid_h; }

  void validate() const;
};

// Grid-shaped detector output of shape [grid_h, grid_w, channels], row-major.
// Each anchor occupies (tx, ty, tw, th, to, c_1 .. c_C).
class RawPrediction {
 public:
  RawPrediction(int grid_h, int grid_w, int channels, double fill = 0.0);

  int grid_h() const { return grid_h_; }
  int grid_w() const { return grid_w_; }
  int channels() const { return channels_; }

  double& at(int row, int col, int channel) { return values_[offset(row, col, channel)]; }
  double at(int row, int col, int channel) const {
    return values_[offset(row, col, channel)];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // Throws InvalidInput if the shape differs from what `cfg` expects.
  void require_shape(const HeadConfig& cfg) const;

  bool operator==(const RawPrediction&) const = default;

 private:
  std::size_t offset(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_w_) +
            static_cast<std::size_t>(col)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(channel);
  }

  int grid_h_;
  int grid_w_;
  int channels_;
  std::vector<double> values_;
};

// Channel offsets within one anchor's block.
enum AnchorChannel : int { kTx = 0, kTy = 1, kTw = 2, kTh = 3, kTo = 4, kClass0 = 5 };

// Logit assigned to the target class by encode_detections; other class logits
// are zero.
inline constexpr double kClassLogitMargin = 40.0;
// Objectness logit written to anchors without a detection.
inline constexpr double kEmptyObjectness = -20.0;

double sigmoid(double x);
double logit(double p);

struct Slot {
  int row = 0;
  int col = 0;
  int anchor = 0;

  auto operator<=>(const Slot&) const = default;
};

// Cell containing the centre and the prior with maximum centred IoU (lowest
// index on ties).
Slot assign_slot(double cx, double cy, double w, double h, const HeadConfig& cfg);

// Predicted box of one slot in network coordinates.
BBox decode_box(const RawPrediction& raw, const HeadConfig& cfg, const Slot& slot);

// Decodes every (cell, anchor) with score >= score_threshold, where
// score = sigmoid(to) * max softmax class probability.
std::vector<Detection> decode(const RawPrediction& raw, const HeadConfig& cfg,
                              double score_threshold);

// Right-inverse of decode: writes each detection into its slot. Throws
// CapacityError when two detections claim the same slot and InvalidInput for
// centres outside the tile, non-positive sizes, or scores outside (0, 1).
RawPrediction encode_detections(std::span<const Detection> dets,
                                const HeadConfig& cfg);

struct LossWeights {
  double coord = 5.0;
  double noobj = 0.5;
  // Predictions overlapping a truth at least this much are not penalised as
  // background.
  double ignore_iou = 0.6;
};

struct LossTerms {
  double coord = 0.0;
  double obj = 0.0;
  double noobj = 0.0;
  double cls = 0.0;

  double total() const { return coord + obj + noobj + cls; }
};

struct LossResult {
  LossTerms terms;
  RawPrediction grad;

  double loss() const { return terms.total(); }
};

// Squared error on (sigmoid(tx), sigmoid(ty), tw, th) and objectness,
// cross-entropy on classes, with the analytic gradient w.r.t. every raw entry.
// Ignore-flagged truths only mask the background term.
LossResult loss_and_grad(const RawPrediction& raw, std::span<const Annotation> truth,
                         const HeadConfig& cfg, const LossWeights& weights = {});

}  // namespace symspot
