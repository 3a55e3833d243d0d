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

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "symspot/error.hpp"

namespace symspot {
namespace {

// Fractional cell offsets are kept this far from 0 and 1 so their logit stays
// finite.
constexpr double kOffsetEps = 1e-12;

std::string slot_name(const Slot& s) {
  return "cell (" + std::to_string(s.row) + ", " + std::to_string(s.col) +
         ") anchor " + std::to_string(s.anchor);
}

// Softmax over `logits` written into `probs`; returns log of the normaliser
// relative to the max logit.
void softmax(std::span<const double> logits, std::vector<double>& probs) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  probs.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - mx);
    sum += probs[i];
  }
  for (auto& p : probs) p /= sum;
}

std::span<const double> class_logits(const RawPrediction& raw, const HeadConfig& cfg,
                                     const Slot& s) {
  const int base = s.anchor * cfg.values_per_anchor();
  const auto offset = (static_cast<std::size_t>(s.row) * static_cast<std::size_t>(raw.grid_w()) +
                       static_cast<std::size_t>(s.col)) *
                          static_cast<std::size_t>(raw.channels()) +
                      static_cast<std::size_t>(base + kClass0);
  return raw.values().subspan(offset, static_cast<std::size_t>(cfg.num_classes));
}

}  // namespace

void HeadConfig::validate() const {
  if (grid_h < 1 || grid_w < 1) throw InvalidInput("head: grid must be at least 1x1");
  if (num_classes < 1) throw InvalidInput("head: need at least one class");
  if (anchors.priors.empty()) throw InvalidInput("head: anchor set is empty");
  for (const auto& p : anchors.priors) {
    if (!(p.w > 0.0 && p.h > 0.0)) throw InvalidInput("head: anchors must be positive");
  }
  if (!(net_size > 0.0)) throw InvalidInput("head: net_size must be positive");
}

RawPrediction::RawPrediction(int grid_h, int grid_w, int channels, double fill)
    : grid_h_(grid_h), grid_w_(grid_w), channels_(channels) {
  if (grid_h < 1 || grid_w < 1 || channels < 1) {
    throw InvalidInput("prediction tensor dimensions must be positive");
  }
  values_.assign(static_cast<std::size_t>(grid_h) * static_cast<std::size_t>(grid_w) *
                     static_cast<std::size_t>(channels),
                 fill);
}

void RawPrediction::require_shape(const HeadConfig& cfg) const {
  if (grid_h_ != cfg.grid_h || grid_w_ != cfg.grid_w || channels_ != cfg.channels()) {
    throw InvalidInput("prediction shape [" + std::to_string(grid_h_) + ", " +
                       std::to_string(grid_w_) + ", " + std::to_string(channels_) +
                       "] does not match the head [" + std::to_string(cfg.grid_h) +
                       ", " + std::to_string(cfg.grid_w) + ", " +
                       std::to_string(cfg.channels()) + "]");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

Slot assign_slot(double cx, double cy, double w, double h, const HeadConfig& cfg) {
  Slot s;
  s.col = std::clamp(static_cast<int>(std::floor(cx / cfg.cell_w())), 0, cfg.grid_w - 1);
  s.row = std::clamp(static_cast<int>(std::floor(cy / cfg.cell_h())), 0, cfg.grid_h - 1);
  double best = -1.0;
  for (int a = 0; a < cfg.num_anchors(); ++a) {
    const double v = centered_iou({w, h}, cfg.anchors.priors[static_cast<std::size_t>(a)]);
    if (v > best) {
      best = v;
      s.anchor = a;
    }
  }
  return s;
}

BBox decode_box(const RawPrediction& raw, const HeadConfig& cfg, const Slot& s) {
  const int base = s.anchor * cfg.values_per_anchor();
  const auto& prior = cfg.anchors.priors[static_cast<std::size_t>(s.anchor)];
  const double cx = (sigmoid(raw.at(s.row, s.col, base + kTx)) + s.col) * cfg.cell_w();
  const double cy = (sigmoid(raw.at(s.row, s.col, base + kTy)) + s.row) * cfg.cell_h();
  const double w = prior.w * std::exp(raw.at(s.row, s.col, base + kTw));
  const double h = prior.h * std::exp(raw.at(s.row, s.col, base + kTh));
  return BBox::from_center(cx, cy, w, h);
}

std::vector<Detection> decode(const RawPrediction& raw, const HeadConfig& cfg,
                              double score_threshold) {
  cfg.validate();
  raw.require_shape(cfg);
  std::vector<Detection> out;
  std::vector<double> probs;
  for (int row = 0; row < cfg.grid_h; ++row) {
    for (int col = 0; col < cfg.grid_w; ++col) {
      for (int a = 0; a < cfg.num_anchors(); ++a) {
        const Slot s{row, col, a};
        const int base = a * cfg.values_per_anchor();
        const double objectness = sigmoid(raw.at(row, col, base + kTo));
        softmax(class_logits(raw, cfg, s), probs);
        const auto best = std::max_element(probs.begin(), probs.end());
        const double score = objectness * *best;
        if (score < score_threshold) continue;
        out.push_back({static_cast<int>(best - probs.begin()), decode_box(raw, cfg, s),
                       score});
      }
    }
  }
  return out;
}

RawPrediction encode_detections(std::span<const Detection> dets, const HeadConfig& cfg) {
  cfg.validate();
  RawPrediction raw(cfg.grid_h, cfg.grid_w, cfg.channels());
  for (int row = 0; row < cfg.grid_h; ++row) {
    for (int col = 0; col < cfg.grid_w; ++col) {
      for (int a = 0; a < cfg.num_anchors(); ++a) {
        raw.at(row, col, a * cfg.values_per_anchor() + kTo) = kEmptyObjectness;
      }
    }
  }
  std::map<Slot, std::size_t> claimed;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    const double cx = d.box.center_x();
    const double cy = d.box.center_y();
    if (!d.box.valid()) {
      throw InvalidInput("encode: detection #" + std::to_string(i) + " has a degenerate box");
    }
    if (cx < 0.0 || cy < 0.0 || cx >= cfg.net_size || cy >= cfg.net_size) {
      throw InvalidInput("encode: detection #" + std::to_string(i) +
                         " has its centre outside the tile");
    }
    if (!(d.score > 0.0 && d.score < 1.0)) {
      throw InvalidInput("encode: detection #" + std::to_string(i) +
                         " score must lie strictly between 0 and 1");
    }
    if (d.class_id < 0 || d.class_id >= cfg.num_classes) {
      throw InvalidInput("encode: detection #" + std::to_string(i) + " has unknown class " +
                         std::to_string(d.class_id));
    }
    const Slot s = assign_slot(cx, cy, d.box.w, d.box.h, cfg);
    const auto [it, inserted] = claimed.emplace(s, i);
    if (!inserted) {
      throw CapacityError("encode: detections #" + std::to_string(it->second) + " and #" +
                          std::to_string(i) + " both claim " + slot_name(s));
    }
    const int base = s.anchor * cfg.values_per_anchor();
    const auto& prior = cfg.anchors.priors[static_cast<std::size_t>(s.anchor)];
    const double fx = std::clamp(cx / cfg.cell_w() - s.col, kOffsetEps, 1.0 - kOffsetEps);
    const double fy = std::clamp(cy / cfg.cell_h() - s.row, kOffsetEps, 1.0 - kOffsetEps);
    raw.at(s.row, s.col, base + kTx) = logit(fx);
    raw.at(s.row, s.col, base + kTy) = logit(fy);
    raw.at(s.row, s.col, base + kTw) = std::log(d.box.w / prior.w);
    raw.at(s.row, s.col, base + kTh) = std::log(d.box.h / prior.h);
    raw.at(s.row, s.col, base + kTo) = logit(d.score);
    raw.at(s.row, s.col, base + kClass0 + d.class_id) = kClassLogitMargin;
  }
  return raw;
}

LossResult loss_and_grad(const RawPrediction& raw, std::span<const Annotation> truth,
                         const HeadConfig& cfg, const LossWeights& weights) {
  cfg.validate();
  raw.require_shape(cfg);

  std::vector<BBox> positives;
  std::vector<BBox> ignores;
  std::map<Slot, const Annotation*> responsible;
  for (const auto& t : truth) {
    require_valid(t.box, "loss truth");
    if (t.class_id < 0 || t.class_id >= cfg.num_classes) {
      throw InvalidInput("loss: truth has unknown class " + std::to_string(t.class_id));
    }
    if (t.ignore) {
      ignores.push_back(t.box);
      continue;
    }
    positives.push_back(t.box);
    // First truth wins a contested slot; later ones still mask background.
    responsible.emplace(
        assign_slot(t.box.center_x(), t.box.center_y(), t.box.w, t.box.h, cfg), &t);
  }

  LossResult result{{}, RawPrediction(raw.grid_h(), raw.grid_w(), raw.channels())};
  RawPrediction& grad = result.grad;
  std::vector<double> probs;

  for (int row = 0; row < cfg.grid_h; ++row) {
    for (int col = 0; col < cfg.grid_w; ++col) {
      for (int a = 0; a < cfg.num_anchors(); ++a) {
        const Slot s{row, col, a};
        const int base = a * cfg.values_per_anchor();
        const double so = sigmoid(raw.at(row, col, base + kTo));
        const auto it = responsible.find(s);

        if (it == responsible.end()) {
          const BBox pred = decode_box(raw, cfg, s);
          double best = 0.0;
          for (const auto& p : positives) best = std::max(best, iou(pred, p));
          const double px = pred.center_x();
          const double py = pred.center_y();
          const bool in_ignore =
              std::any_of(ignores.begin(), ignores.end(), [&](const BBox& g) {
                return px >= g.x && px < g.right() && py >= g.y && py < g.bottom();
              });
          if (best < weights.ignore_iou && !in_ignore) {
            result.terms.noobj += weights.noobj * so * so;
            grad.at(row, col, base + kTo) = weights.noobj * 2.0 * so * so * (1.0 - so);
          }
          continue;
        }

        const Annotation& t = *it->second;
        const auto& prior = cfg.anchors.priors[static_cast<std::size_t>(a)];
        const double target[4] = {t.box.center_x() / cfg.cell_w() - col,
                                  t.box.center_y() / cfg.cell_h() - row,
                                  std::log(t.box.w / prior.w), std::log(t.box.h / prior.h)};
        for (int k = 0; k < 2; ++k) {
          const double sv = sigmoid(raw.at(row, col, base + k));
          const double r = sv - target[k];
          result.terms.coord += weights.coord * r * r;
          grad.at(row, col, base + k) = weights.coord * 2.0 * r * sv * (1.0 - sv);
        }
        for (int k = 2; k < 4; ++k) {
          const double r = raw.at(row, col, base + k) - target[k];
          result.terms.coord += weights.coord * r * r;
          grad.at(row, col, base + k) = weights.coord * 2.0 * r;
        }

        result.terms.obj += (so - 1.0) * (so - 1.0);
        grad.at(row, col, base + kTo) = 2.0 * (so - 1.0) * so * (1.0 - so);

        const auto logits = class_logits(raw, cfg, s);
        softmax(logits, probs);
        const double mx = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (double l : logits) sum += std::exp(l - mx);
        // -log softmax_k computed in log space.
        result.terms.cls += std::log(sum) + mx - logits[static_cast<std::size_t>(t.class_id)];
        for (int c = 0; c < cfg.num_classes; ++c) {
          grad.at(row, col, base + kClass0 + c) =
              probs[static_cast<std::size_t>(c)] - (c == t.class_id ? 1.0 : 0.0);
        }
      }
    }
  }
  return result;
}

}  // namespace symspot
