// Copyright 2026 The Slimkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Detection evaluation: IoU, greedy matching, P/R/F, 101-point AP and
// mAP over a range of IoU thresholds.

#ifndef SLIMKIT_METRICS_DETECTION_H_
#define SLIMKIT_METRICS_DETECTION_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slimkit::metrics {

struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double area() const;
};

struct BoxDet {
  int image_id = 0;
  int class_id = 0;
  Box box;
  double confidence = 1.0;  // ignored for ground truth
};

// Zero for disjoint or zero-area boxes.
double Iou(const Box& a, const Box& b);

struct MatchCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

struct MatchResult {
  MatchCounts counts;
  std::vector<bool> is_tp;  // pairs with the input detections
};

// Greedy one-to-one matching per (image, class): detections by confidence
// descending (ties in input order) take the highest-IoU unmatched ground
// truth with IoU >= threshold (ties to the earlier ground truth).
MatchResult Match(std::span<const BoxDet> dets, std::span<const BoxDet> gts,
                  double iou_threshold);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
};

// Zero denominators give 0.
Prf ComputePrf(const MatchCounts& counts);
Prf PrfFromRates(double precision, double recall);

// 101-point interpolated AP. nullopt when there is neither a ground truth
// nor a detection (the class is left out of averaging).
std::optional<double> AveragePrecision(const std::vector<bool>& is_tp,
                                       std::span<const double> confidence,
                                       int gt_count);

std::vector<double> DefaultIouThresholds();  // 0.50, 0.55, ..., 0.95

struct MetricsOptions {
  std::vector<double> iou_thresholds = DefaultIouThresholds();
  double prf_iou = 0.5;
  double prf_confidence = 0.25;
};

struct MetricsReport {
  int num_classes = 0;
  std::vector<double> iou_thresholds;
  // ap[class][threshold]; nullopt for classes with no data.
  std::vector<std::vector<std::optional<double>>> ap;
  std::vector<double> map;  // per threshold
  double map50 = 0.0;
  double map50_95 = 0.0;
  MatchCounts counts;  // at prf_iou / prf_confidence
  Prf prf;
};

// Throws InputError for class ids outside [0, num_classes).
MetricsReport MapRange(std::span<const BoxDet> dets, std::span<const BoxDet> gts,
                       int num_classes, const MetricsOptions& options = {});

// Detector label lines: "class cx cy w h [confidence]", normalized to the
// image size. Throws InputError naming the line.
std::vector<BoxDet> ParseLabels(std::string_view text, int image_id, int width,
                                int height);
std::string FormatLabels(std::span<const BoxDet> boxes, int width, int height,
                         bool with_confidence);

std::string MetricsReportJson(const MetricsReport& report,
                              std::span<const std::string> class_names = {});

}  // namespace slimkit::metrics

#endif  // SLIMKIT_METRICS_DETECTION_H_
