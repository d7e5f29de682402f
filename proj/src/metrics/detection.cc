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


#include "slimkit/metrics/detection.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "slimkit/util/errors.h"

namespace slimkit::metrics {
namespace {

constexpr int kRecallPoints = 101;

std::vector<std::size_t> ByConfidence(std::span<const BoxDet> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });
  return order;
}

void CheckClass(const BoxDet& b, int num_classes, const char* what) {
  if (b.class_id < 0 || b.class_id >= num_classes) {
    throw InputError(std::string(what) + " on image " + std::to_string(b.image_id) +
                     " has class id " + std::to_string(b.class_id) +
                     " outside [0, " + std::to_string(num_classes) + ")");
  }
}

double MapAt(const std::vector<std::optional<double>>& per_class) {
  double sum = 0.0;
  int n = 0;
  for (const auto& ap : per_class) {
    if (ap) {
      sum += *ap;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / n;
}

std::vector<std::optional<double>> ApPerClass(std::span<const BoxDet> dets,
                                              std::span<const BoxDet> gts,
                                              int num_classes, double iou) {
  const MatchResult m = Match(dets, gts, iou);
  std::vector<std::vector<bool>> flags(num_classes);
  std::vector<std::vector<double>> conf(num_classes);
  std::vector<int> gt_count(num_classes, 0);
  for (const BoxDet& g : gts) ++gt_count[g.class_id];
  for (std::size_t i = 0; i < dets.size(); ++i) {
    flags[dets[i].class_id].push_back(m.is_tp[i]);
    conf[dets[i].class_id].push_back(dets[i].confidence);
  }
  std::vector<std::optional<double>> out(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    out[c] = AveragePrecision(flags[c], conf[c], gt_count[c]);
  }
  return out;
}

}  // namespace

double Box::area() const {
  return std::max(0.0, x2 - x1) * std::max(0.0, y2 - y1);
}

double Iou(const Box& a, const Box& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (area_a + area_b - inter);
}

MatchResult Match(std::span<const BoxDet> dets, std::span<const BoxDet> gts,
                  double iou_threshold) {
  MatchResult r;
  r.is_tp.assign(dets.size(), false);
  // Ground truths grouped by (image, class), kept in input order.
  std::map<std::pair<int, int>, std::vector<std::size_t>> pools;
  for (std::size_t g = 0; g < gts.size(); ++g) {
    pools[{gts[g].image_id, gts[g].class_id}].push_back(g);
  }
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d : ByConfidence(dets)) {
    auto it = pools.find({dets[d].image_id, dets[d].class_id});
    if (it == pools.end()) continue;
    double best = -1.0;
    std::size_t best_g = 0;
    for (std::size_t g : it->second) {
      if (taken[g]) continue;
      const double v = Iou(dets[d].box, gts[g].box);
      if (v >= iou_threshold && v > best) {
        best = v;
        best_g = g;
      }
    }
    if (best >= 0.0) {
      taken[best_g] = true;
      r.is_tp[d] = true;
    }
  }
  r.counts.tp = static_cast<int>(std::count(r.is_tp.begin(), r.is_tp.end(), true));
  r.counts.fp = static_cast<int>(dets.size()) - r.counts.tp;
  r.counts.fn = static_cast<int>(gts.size()) - r.counts.tp;
  return r;
}

Prf PrfFromRates(double precision, double recall) {
  Prf p{precision, recall, 0.0};
  if (precision + recall > 0.0) {
    p.f_score = 2.0 * precision * recall / (precision + recall);
  }
  return p;
}

Prf ComputePrf(const MatchCounts& c) {
  const double p = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
  const double r = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
  return PrfFromRates(p, r);
}

std::optional<double> AveragePrecision(const std::vector<bool>& is_tp,
                                       std::span<const double> confidence,
                                       int gt_count) {
  if (is_tp.size() != confidence.size()) {
    throw InputError("average precision: flag and confidence counts differ");
  }
  if (gt_count < 0) throw InputError("average precision: negative gt count");
  if (gt_count == 0) {
    if (is_tp.empty()) return std::nullopt;
    return 0.0;  // only false positives
  }
  std::vector<std::size_t> order(is_tp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidence[a] > confidence[b];
  });
  const std::size_t n = order.size();
  std::vector<double> recall(n);
  std::vector<double> precision(n);
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (is_tp[order[k]]) {
      tp += 1.0;
    } else {
      fp += 1.0;
    }
    recall[k] = tp / gt_count;
    precision[k] = tp / (tp + fp);
  }
  // Precision envelope: best precision at any deeper rank.
  for (std::size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double sum = 0.0;
  for (int i = 0; i < kRecallPoints; ++i) {
    const double r = i / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[it - recall.begin()];
  }
  return sum / kRecallPoints;
}

std::vector<double> DefaultIouThresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

MetricsReport MapRange(std::span<const BoxDet> dets, std::span<const BoxDet> gts,
                       int num_classes, const MetricsOptions& options) {
  if (num_classes < 1) throw InputError("metrics need at least one class");
  if (options.iou_thresholds.empty()) throw InputError("no IoU thresholds given");
  for (const BoxDet& d : dets) CheckClass(d, num_classes, "detection");
  for (const BoxDet& g : gts) CheckClass(g, num_classes, "ground truth");

  MetricsReport rep;
  rep.num_classes = num_classes;
  rep.iou_thresholds = options.iou_thresholds;
  rep.ap.assign(num_classes, {});
  for (double t : options.iou_thresholds) {
    const auto per_class = ApPerClass(dets, gts, num_classes, t);
    for (int c = 0; c < num_classes; ++c) rep.ap[c].push_back(per_class[c]);
    rep.map.push_back(MapAt(per_class));
  }
  rep.map50_95 = std::accumulate(rep.map.begin(), rep.map.end(), 0.0) /
                 static_cast<double>(rep.map.size());
  const auto at50 = std::find(options.iou_thresholds.begin(),
                              options.iou_thresholds.end(), 0.5);
  rep.map50 = at50 != options.iou_thresholds.end()
                  ? rep.map[at50 - options.iou_thresholds.begin()]
                  : MapAt(ApPerClass(dets, gts, num_classes, 0.5));

  std::vector<BoxDet> confident;
  for (const BoxDet& d : dets) {
    if (d.confidence >= options.prf_confidence) confident.push_back(d);
  }
  rep.counts = Match(confident, gts, options.prf_iou).counts;
  rep.prf = ComputePrf(rep.counts);
  return rep;
}

std::vector<BoxDet> ParseLabels(std::string_view text, int image_id, int width,
                                int height) {
  std::vector<BoxDet> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw InputError("label line " + std::to_string(line_no) + " of image " +
                       std::to_string(image_id) + ": " + why);
    };
    if (tok.size() != 5 && tok.size() != 6) fail("expected 5 or 6 fields");
    std::vector<double> v;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(tok[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok[i].size() || !std::isfinite(x)) fail("bad number '" + tok[i] + "'");
      v.push_back(x);
    }
    std::size_t used = 0;
    int cls = -1;
    try {
      cls = std::stoi(tok[0], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok[0].size() || cls < 0) fail("bad class id '" + tok[0] + "'");
    if (v[2] <= 0.0 || v[3] <= 0.0) fail("box width and height must be positive");
    BoxDet b;
    b.image_id = image_id;
    b.class_id = cls;
    b.box = {(v[0] - v[2] / 2) * width, (v[1] - v[3] / 2) * height,
             (v[0] + v[2] / 2) * width, (v[1] + v[3] / 2) * height};
    if (tok.size() == 6) {
      if (v[4] < 0.0 || v[4] > 1.0) fail("confidence outside [0, 1]");
      b.confidence = v[4];
    }
    out.push_back(b);
  }
  return out;
}

std::string FormatLabels(std::span<const BoxDet> boxes, int width, int height,
                         bool with_confidence) {
  std::ostringstream os;
  os.precision(17);
  for (const BoxDet& b : boxes) {
    os << b.class_id << ' ' << (b.box.x1 + b.box.x2) / 2 / width << ' '
       << (b.box.y1 + b.box.y2) / 2 / height << ' ' << (b.box.x2 - b.box.x1) / width
       << ' ' << (b.box.y2 - b.box.y1) / height;
    if (with_confidence) os << ' ' << b.confidence;
    os << '\n';
  }
  return os.str();
}

std::string MetricsReportJson(const MetricsReport& r,
                              std::span<const std::string> class_names) {
  nlohmann::ordered_json j;
  j["num_classes"] = r.num_classes;
  j["map50"] = r.map50;
  j["map50_95"] = r.map50_95;
  j["precision"] = r.prf.precision;
  j["recall"] = r.prf.recall;
  j["f_score"] = r.prf.f_score;
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["fn"] = r.counts.fn;
  j["percent"] = {{"map50", 100 * r.map50},
                  {"map50_95", 100 * r.map50_95},
                  {"precision", 100 * r.prf.precision},
                  {"recall", 100 * r.prf.recall},
                  {"f_score", 100 * r.prf.f_score}};
  j["iou_thresholds"] = r.iou_thresholds;
  j["map_per_threshold"] = r.map;
  auto& classes = j["per_class_ap"] = nlohmann::ordered_json::array();
  for (int c = 0; c < r.num_classes; ++c) {
    nlohmann::ordered_json row;
    row["class_id"] = c;
    if (static_cast<std::size_t>(c) < class_names.size()) row["name"] = class_names[c];
    auto& aps = row["ap"] = nlohmann::ordered_json::array();
    for (const auto& ap : r.ap[c]) aps.push_back(ap ? nlohmann::ordered_json(*ap) : nullptr);
    classes.push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace slimkit::metrics
