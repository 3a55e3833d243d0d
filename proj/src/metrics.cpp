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

#include "symspot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "symspot/error.hpp"
#include "symspot/geometry.hpp"
#include "symspot/merger.hpp"

namespace symspot {
namespace {

constexpr double kEps = 1e-9;

struct RankedDetection {
  const Detection* det;
  std::size_t image;
};

std::vector<const Annotation*> class_truths(const ImageEval& img, int class_id) {
  std::vector<const Annotation*> out;
  for (const auto& t : img.truths) {
    if (!t.ignore && t.class_id == class_id) out.push_back(&t);
  }
  return out;
}

ImageEval single_image(const std::vector<Detection>& dets,
                       const std::vector<Annotation>& truths, int w = 0, int h = 0) {
  return {dets, truths, w, h};
}

struct PixelTotals {
  long long inter = 0;
  long long retrieved = 0;
  long long relevant = 0;
};

}  // namespace

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
  return t;
}

double average_precision(std::span<const ImageEval> images, int class_id,
                         double iou_threshold, int num_classes) {
  if (class_id < 0 || class_id >= num_classes) {
    throw InvalidInput("average_precision: unknown class_id " + std::to_string(class_id));
  }
  std::vector<std::vector<const Annotation*>> truths(images.size());
  std::size_t num_truths = 0;
  std::vector<RankedDetection> ranked;
  for (std::size_t i = 0; i < images.size(); ++i) {
    truths[i] = class_truths(images[i], class_id);
    num_truths += truths[i].size();
    for (const auto& d : images[i].detections) {
      if (d.class_id == class_id) ranked.push_back({&d, i});
    }
  }
  if (num_truths == 0) return ranked.empty() ? 1.0 : 0.0;
  if (ranked.empty()) return 0.0;

  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedDetection& a, const RankedDetection& b) {
                     return detection_order(*a.det, *b.det);
                   });

  std::vector<std::vector<bool>> matched(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) matched[i].assign(truths[i].size(), false);

  std::vector<bool> is_tp(ranked.size(), false);
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const auto& cands = truths[ranked[k].image];
    auto& used = matched[ranked[k].image];
    double best = -1.0;
    std::size_t best_idx = cands.size();
    for (std::size_t t = 0; t < cands.size(); ++t) {
      if (used[t]) continue;
      const double v = iou(ranked[k].det->box, cands[t]->box);
      if (v >= iou_threshold - kEps && v > best) {
        best = v;
        best_idx = t;
      }
    }
    if (best_idx < cands.size()) {
      used[best_idx] = true;
      is_tp[k] = true;
    }
  }

  // Precision at each rank, then its non-increasing envelope from the right.
  std::vector<double> precision(ranked.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    tp += is_tp[k] ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  for (std::size_t k = ranked.size() - 1; k-- > 0;) {
    precision[k] = std::max(precision[k], precision[k + 1]);
  }
  // Recall rises by 1/num_truths exactly at true positives.
  double sum = 0.0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (is_tp[k]) sum += precision[k];
  }
  return sum / static_cast<double>(num_truths);
}

double average_precision(const std::vector<Detection>& dets,
                         const std::vector<Annotation>& truths, int class_id,
                         double iou_threshold, int num_classes) {
  const ImageEval img = single_image(dets, truths);
  return average_precision(std::span(&img, 1), class_id, iou_threshold, num_classes);
}

PRF PRF::from(double precision, double recall) {
  const double f =
      precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return {precision, recall, f};
}

PRF instance_prf(std::span<const ImageEval> images) {
  std::size_t num_dets = 0, hits = 0, num_truths = 0, recalled = 0;
  for (const auto& img : images) {
    std::vector<const Annotation*> truths;
    for (const auto& t : img.truths) {
      if (!t.ignore) truths.push_back(&t);
    }
    num_truths += truths.size();
    num_dets += img.detections.size();
    std::vector<bool> found(truths.size(), false);
    for (const auto& d : img.detections) {
      bool hit = false;
      for (std::size_t t = 0; t < truths.size(); ++t) {
        if (truths[t]->class_id == d.class_id &&
            intersection_area(d.box, truths[t]->box) > 0.0) {
          hit = true;
          found[t] = true;
        }
      }
      hits += hit ? 1 : 0;
    }
    recalled += static_cast<std::size_t>(std::count(found.begin(), found.end(), true));
  }
  if (num_dets == 0 && num_truths == 0) return {1.0, 1.0, 1.0};
  const double p = num_dets ? static_cast<double>(hits) / static_cast<double>(num_dets) : 0.0;
  const double r = num_truths
                       ? static_cast<double>(recalled) / static_cast<double>(num_truths)
                       : 1.0;
  return PRF::from(p, r);
}

PRF instance_prf(const std::vector<Detection>& dets, const std::vector<Annotation>& truths) {
  const ImageEval img = single_image(dets, truths);
  return instance_prf(std::span(&img, 1));
}

PixelRect snap_to_pixels(const BBox& box, int plan_width, int plan_height) {
  // Pixel i is covered when its centre i + 0.5 lies in [x, x + w).
  const auto lo = [](double v, int limit) {
    return std::clamp(static_cast<long>(std::ceil(v - 0.5)), 0L, static_cast<long>(limit));
  };
  return {lo(box.x, plan_width), lo(box.y, plan_height), lo(box.right(), plan_width),
          lo(box.bottom(), plan_height)};
}

long long union_area(std::span<const PixelRect> rects) {
  std::vector<long> xs;
  for (const auto& r : rects) {
    if (r.x1 <= r.x0 || r.y1 <= r.y0) continue;
    xs.push_back(r.x0);
    xs.push_back(r.x1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  long long total = 0;
  std::vector<std::pair<long, long>> spans;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    spans.clear();
    for (const auto& r : rects) {
      if (r.x1 <= r.x0 || r.y1 <= r.y0) continue;
      if (r.x0 <= xs[k] && r.x1 >= xs[k + 1]) spans.emplace_back(r.y0, r.y1);
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    long long covered = 0;
    long cur_lo = spans[0].first, cur_hi = spans[0].second;
    for (std::size_t s = 1; s < spans.size(); ++s) {
      if (spans[s].first > cur_hi) {
        covered += cur_hi - cur_lo;
        cur_lo = spans[s].first;
        cur_hi = spans[s].second;
      } else {
        cur_hi = std::max(cur_hi, spans[s].second);
      }
    }
    covered += cur_hi - cur_lo;
    total += covered * (xs[k + 1] - xs[k]);
  }
  return total;
}

PRF pixel_prf(std::span<const ImageEval> images) {
  PixelTotals sum;
  for (const auto& img : images) {
    std::map<int, std::pair<std::vector<PixelRect>, std::vector<PixelRect>>> by_class;
    for (const auto& d : img.detections) {
      by_class[d.class_id].first.push_back(snap_to_pixels(d.box, img.width, img.height));
    }
    for (const auto& t : img.truths) {
      if (t.ignore) continue;
      by_class[t.class_id].second.push_back(snap_to_pixels(t.box, img.width, img.height));
    }
    for (const auto& [cls, sets] : by_class) {
      const auto& [retrieved, relevant] = sets;
      std::vector<PixelRect> both = retrieved;
      both.insert(both.end(), relevant.begin(), relevant.end());
      const long long a = union_area(retrieved);
      const long long b = union_area(relevant);
      sum.retrieved += a;
      sum.relevant += b;
      sum.inter += a + b - union_area(both);
    }
  }
  if (sum.retrieved == 0 && sum.relevant == 0) return {1.0, 1.0, 1.0};
  const double p = sum.retrieved ? static_cast<double>(sum.inter) /
                                       static_cast<double>(sum.retrieved)
                                 : 0.0;
  const double r = sum.relevant ? static_cast<double>(sum.inter) /
                                      static_cast<double>(sum.relevant)
                                : 1.0;
  return PRF::from(p, r);
}

PRF pixel_prf(const std::vector<Detection>& dets, const std::vector<Annotation>& truths,
              int plan_width, int plan_height) {
  const ImageEval img = single_image(dets, truths, plan_width, plan_height);
  return pixel_prf(std::span(&img, 1));
}

EvalReport evaluate(std::span<const ImageEval> images,
                    const std::vector<std::string>& class_names) {
  EvalReport report;
  report.class_names = class_names;
  const int num_classes = static_cast<int>(class_names.size());
  std::vector<bool> present(class_names.size(), false);
  for (const auto& img : images) {
    for (const auto& d : img.detections) {
      if (d.class_id < 0 || d.class_id >= num_classes) {
        throw InvalidInput("evaluate: detection with unknown class_id " +
                           std::to_string(d.class_id));
      }
      present[static_cast<std::size_t>(d.class_id)] = true;
    }
    for (const auto& t : img.truths) {
      if (t.class_id < 0 || t.class_id >= num_classes) {
        throw InvalidInput("evaluate: truth with unknown class_id " +
                           std::to_string(t.class_id));
      }
      if (!t.ignore) present[static_cast<std::size_t>(t.class_id)] = true;
    }
  }

  const auto thresholds = coco_iou_thresholds();
  for (int c = 0; c < num_classes; ++c) {
    if (!present[static_cast<std::size_t>(c)]) continue;
    ClassAP ap;
    double sum = 0.0;
    for (double t : thresholds) {
      const double v = average_precision(images, c, t, num_classes);
      sum += v;
      if (t == 0.5) ap.ap50 = v;
    }
    ap.ap75 = average_precision(images, c, 0.75, num_classes);
    ap.map = sum / static_cast<double>(thresholds.size());
    report.per_class[c] = ap;
  }
  if (!report.per_class.empty()) {
    for (const auto& [c, ap] : report.per_class) {
      report.aggregate.ap50 += ap.ap50;
      report.aggregate.ap75 += ap.ap75;
      report.aggregate.map += ap.map;
    }
    const double n = static_cast<double>(report.per_class.size());
    report.aggregate.ap50 /= n;
    report.aggregate.ap75 /= n;
    report.aggregate.map /= n;
  }
  report.instance = instance_prf(images);
  report.pixel = pixel_prf(images);
  return report;
}

Json report_to_json(const EvalReport& report) {
  const auto r = [](double v) { return round_significant(v); };
  const auto prf = [&](const PRF& p) {
    Json j;
    j["precision"] = r(p.precision);
    j["recall"] = r(p.recall);
    j["f_score"] = r(p.f_score);
    return j;
  };
  Json doc;
  doc["classes"] = report.class_names;
  Json per_class = Json::array();
  for (const auto& [c, ap] : report.per_class) {
    Json row;
    row["class_id"] = c;
    row["class_name"] = report.class_names[static_cast<std::size_t>(c)];
    row["ap50"] = r(ap.ap50);
    row["ap75"] = r(ap.ap75);
    row["map"] = r(ap.map);
    per_class.push_back(std::move(row));
  }
  doc["per_class"] = std::move(per_class);
  doc["aggregate"] = {{"AP50", r(report.aggregate.ap50)},
                      {"AP75", r(report.aggregate.ap75)},
                      {"mAP", r(report.aggregate.map)}};
  doc["instance"] = prf(report.instance);
  doc["pixel"] = prf(report.pixel);
  return doc;
}

std::string report_to_table(const EvalReport& report) {
  std::size_t name_w = 6;
  for (const auto& [c, ap] : report.per_class) {
    name_w = std::max(name_w, report.class_names[static_cast<std::size_t>(c)].size());
  }
  const int nw = static_cast<int>(name_w);
  std::string out;
  char line[256];
  const auto pct = [](double v) { return 100.0 * v; };

  std::snprintf(line, sizeof(line), "%-*s | %7s | %7s\n", nw, "Symbol", "AP50", "AP75");
  out += line;
  out += std::string(name_w, '-') + "-+---------+--------\n";
  for (const auto& [c, ap] : report.per_class) {
    std::snprintf(line, sizeof(line), "%-*s | %7.2f | %7.2f\n", nw,
                  report.class_names[static_cast<std::size_t>(c)].c_str(), pct(ap.ap50),
                  pct(ap.ap75));
    out += line;
  }
  out += std::string(name_w, '-') + "-+---------+--------\n";
  std::snprintf(line, sizeof(line), "%-*s | %7.2f | %7.2f\n", nw, "AP",
                pct(report.aggregate.ap50), pct(report.aggregate.ap75));
  out += line;
  std::snprintf(line, sizeof(line), "%-*s | %17.2f\n", nw, "mAP", pct(report.aggregate.map));
  out += line;
  out += "\n";
  std::snprintf(line, sizeof(line), "%-8s | %7s | %7s | %7s\n", "Eval.", "P", "R", "F");
  out += line;
  out += "---------+---------+---------+--------\n";
  for (const auto& [name, p] : {std::pair<const char*, PRF>{"Instance", report.instance},
                                std::pair<const char*, PRF>{"Pixel", report.pixel}}) {
    std::snprintf(line, sizeof(line), "%-8s | %7.2f | %7.2f | %7.2f\n", name,
                  pct(p.precision), pct(p.recall), pct(p.f_score));
    out += line;
  }
  return out;
}

}  // namespace symspot
