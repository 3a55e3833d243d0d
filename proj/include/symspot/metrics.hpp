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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "symspot/annotation.hpp"
#include "symspot/json_io.hpp"

namespace symspot {

// Detections and ground truth of one image. Matching never crosses images.
struct ImageEval {
  std::vector<Detection> detections;
  std::vector<Annotation> truths;
  int width = 0;   // plan size, used by the pixel-wise metric
  int height = 0;
};

// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

// All-point interpolated AP for one class: area under the precision envelope.
// Ignore-flagged truths are dropped. By convention AP = 1 with neither truths
// nor detections, and 0 when only one side is empty. Throws InvalidInput for a
// class outside [0, num_classes).
double average_precision(std::span<const ImageEval> images, int class_id,
                         double iou_threshold, int num_classes);

double average_precision(const std::vector<Detection>& dets,
                         const std::vector<Annotation>& truths, int class_id,
                         double iou_threshold, int num_classes);

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;

  static PRF from(double precision, double recall);
};

// Spotting metric: a detection is a hit if it overlaps any same-class truth at
// all; a truth is recalled if any same-class detection overlaps it.
PRF instance_prf(std::span<const ImageEval> images);
PRF instance_prf(const std::vector<Detection>& dets, const std::vector<Annotation>& truths);

// Pixel metric on box regions, per class, micro-averaged. Boxes are snapped to
// the pixels whose centres they contain and clipped to the plan.
PRF pixel_prf(std::span<const ImageEval> images);
PRF pixel_prf(const std::vector<Detection>& dets, const std::vector<Annotation>& truths,
              int plan_width, int plan_height);

// Pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  long x0, y0, x1, y1;
};

PixelRect snap_to_pixels(const BBox& box, int plan_width, int plan_height);

// Exact area of a union of rectangles by coordinate-compression sweep.
long long union_area(std::span<const PixelRect> rects);

struct ClassAP {
  double ap50 = 0.0;
  double ap75 = 0.0;
  double map = 0.0;
};

struct EvalReport {
  std::vector<std::string> class_names;
  std::map<int, ClassAP> per_class;  // classes with truths or detections
  ClassAP aggregate;                 // macro mean over per_class
  PRF instance;
  PRF pixel;
};

EvalReport evaluate(std::span<const ImageEval> images,
                    const std::vector<std::string>& class_names);

Json report_to_json(const EvalReport& report);
// Aligned text tables: per-class AP50/AP75 with AP and mAP rows, then the
// instance- and pixel-wise P/R/F rows. Values are percentages.
std::string report_to_table(const EvalReport& report);

}  // namespace symspot
