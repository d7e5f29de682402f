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


#include "slimkit/detbench/toydet.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slimkit/graph/builder.h"
#include "slimkit/graph/executor.h"
#include "slimkit/util/errors.h"

namespace slimkit::detbench {
namespace {

using metrics::BoxDet;

double Sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// Binary cross-entropy on a logit; returns the loss and adds d/dz to *grad.
double BceWithLogit(double z, double target, double weight, double* grad) {
  *grad += weight * (Sigmoid(z) - target);
  return weight * (std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z))));
}

struct CellTarget {
  int cls = -1;  // -1 for background
  double box[kBoxChannels] = {0, 0, 0, 0};
};

std::vector<CellTarget> AssignTargets(const std::vector<BoxDet>& labels,
                                      const ToyDetConfig& cfg) {
  const int g = cfg.grid();
  const double stride = cfg.stride();
  std::vector<CellTarget> cells(static_cast<std::size_t>(g) * g);
  for (const BoxDet& obj : labels) {
    const double cx = (obj.box.x1 + obj.box.x2) / 2;
    const double cy = (obj.box.y1 + obj.box.y2) / 2;
    const int col = std::clamp(static_cast<int>(cx / stride), 0, g - 1);
    const int row = std::clamp(static_cast<int>(cy / stride), 0, g - 1);
    // Taken cells push the object to the nearest free cell, first in
    // row-major order among equals.
    int best = -1;
    double best_d = 0.0;
    for (int r = 0; r < g; ++r) {
      for (int c = 0; c < g; ++c) {
        if (cells[r * g + c].cls >= 0) continue;
        const double d = (r - row) * (r - row) + (c - col) * (c - col);
        if (best < 0 || d < best_d) {
          best = r * g + c;
          best_d = d;
        }
      }
    }
    if (best < 0) continue;  // grid full
    CellTarget& t = cells[best];
    t.cls = obj.class_id;
    t.box[0] = cx / stride - best % g;
    t.box[1] = cy / stride - best / g;
    t.box[2] = std::log((obj.box.x2 - obj.box.x1) / cfg.anchor);
    t.box[3] = std::log((obj.box.y2 - obj.box.y1) / cfg.anchor);
  }
  return cells;
}

}  // namespace

void ToyDetConfig::validate() const {
  if (blocks < 1 || blocks > 5) throw ConfigError("blocks must lie in [1, 5]");
  if (image_size % stride() != 0) {
    throw ConfigError("grid stride " + std::to_string(stride()) +
                      " does not divide image size " + std::to_string(image_size));
  }
  if (base_width < 1) throw ConfigError("base_width must be >= 1");
  if (classes < 1) throw ConfigError("classes must be >= 1");
  if (!(anchor > 0)) throw ConfigError("anchor must be > 0");
  if (!(nms_iou > 0 && nms_iou <= 1)) throw ConfigError("nms_iou must lie in (0, 1]");
  if (!(conf_threshold >= 0 && conf_threshold <= 1)) {
    throw ConfigError("conf_threshold must lie in [0, 1]");
  }
}

ToyDetConfig ToyDetConfigFor(const SceneConfig& scene) {
  ToyDetConfig cfg;
  cfg.image_size = scene.image_size;
  cfg.classes = scene.classes;
  cfg.anchor = scene.image_size / 4.0;
  return cfg;
}

graph::GraphModel BuildToyDet(const ToyDetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  graph::GraphBuilder b("toydet", {3, cfg.image_size, cfg.image_size});
  std::string x = b.ConvBnAct("stem", "input", cfg.base_width, 3, 2);
  for (int i = 1; i < cfg.blocks; ++i) {
    x = b.ConvBnAct("down" + std::to_string(i), x, cfg.base_width << i, 3, 2);
  }
  const int width = b.channels(x);
  const std::string r = b.ConvBnAct("res.cv", x, width, 3);
  x = b.Add("res.add", {x, r});
  x = b.ConvBnAct("neck", x, width, 3);
  b.Conv("head", x, kClassOffset + cfg.classes, 1, 1, 0, /*bias=*/true);
  b.Output(b.DetectHead("detect", "head", cfg.classes, 1));
  std::vector<std::string> names(ShapeNames().begin(),
                                 ShapeNames().begin() +
                                     std::min<int>(cfg.classes, kMaxShapeClasses));
  b.SetClasses(names);
  graph::GraphModel m = b.Build();
  graph::InitializeMissingParams(m, seed);
  // Start objectness near the background rate so early gradients are not
  // swamped by empty cells.
  nn::ConvParams& head = m.node("head").conv_params();
  for (double& v : head.weight) v *= 0.1;
  head.bias[kObjChannel] = -4.0;
  return m;
}

DetLossResult DetLoss(const nn::Tensor4& raw,
                      std::span<const std::vector<BoxDet>> labels,
                      const ToyDetConfig& cfg, const LossWeights& w) {
  const int g = cfg.grid();
  if (raw.c() != kClassOffset + cfg.classes || raw.h() != g || raw.w() != g ||
      static_cast<std::size_t>(raw.n()) != labels.size()) {
    throw ShapeError("detection loss: head output " + raw.shape().str() +
                     " does not fit the configuration");
  }
  DetLossResult out;
  out.grad = nn::Tensor4(raw.shape());
  const double scale = 1.0 / raw.n();
  for (int b = 0; b < raw.n(); ++b) {
    const auto cells = AssignTargets(labels[b], cfg);
    for (int r = 0; r < g; ++r) {
      for (int c = 0; c < g; ++c) {
        const CellTarget& t = cells[r * g + c];
        const bool pos = t.cls >= 0;
        out.loss += BceWithLogit(raw.at(b, kObjChannel, r, c), pos ? 1.0 : 0.0,
                                 w.objectness * scale,
                                 &out.grad.at(b, kObjChannel, r, c));
        if (!pos) continue;
        for (int k = 0; k < cfg.classes; ++k) {
          out.loss += BceWithLogit(raw.at(b, kClassOffset + k, r, c),
                                   k == t.cls ? 1.0 : 0.0, w.classes * scale,
                                   &out.grad.at(b, kClassOffset + k, r, c));
        }
        for (int k = 0; k < kBoxChannels; ++k) {
          const double d = raw.at(b, k, r, c) - t.box[k];
          out.loss += w.box * scale * d * d;
          out.grad.at(b, k, r, c) += 2.0 * w.box * scale * d;
        }
      }
    }
  }
  return out;
}

std::vector<BoxDet> Nms(std::vector<BoxDet> boxes, double iou_threshold) {
  std::stable_sort(boxes.begin(), boxes.end(), [](const BoxDet& a, const BoxDet& b) {
    return a.confidence > b.confidence;
  });
  std::vector<BoxDet> kept;
  for (const BoxDet& cand : boxes) {
    bool suppressed = false;
    for (const BoxDet& k : kept) {
      if (k.class_id == cand.class_id && metrics::Iou(k.box, cand.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

std::vector<BoxDet> DecodeAndNms(const nn::Tensor4& raw, int slot, int image_id,
                                 const ToyDetConfig& cfg) {
  const int g = cfg.grid();
  const double stride = cfg.stride();
  const double size = cfg.image_size;
  std::vector<BoxDet> boxes;
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c < g; ++c) {
      int best = 0;
      for (int k = 1; k < cfg.classes; ++k) {
        if (raw.at(slot, kClassOffset + k, r, c) >
            raw.at(slot, kClassOffset + best, r, c)) {
          best = k;
        }
      }
      const double conf = Sigmoid(raw.at(slot, kObjChannel, r, c)) *
                          Sigmoid(raw.at(slot, kClassOffset + best, r, c));
      if (conf < cfg.conf_threshold) continue;
      const double cx = (c + raw.at(slot, 0, r, c)) * stride;
      const double cy = (r + raw.at(slot, 1, r, c)) * stride;
      const double bw = cfg.anchor * std::exp(std::clamp(raw.at(slot, 2, r, c), -6.0, 6.0));
      const double bh = cfg.anchor * std::exp(std::clamp(raw.at(slot, 3, r, c), -6.0, 6.0));
      metrics::Box box{std::clamp(cx - bw / 2, 0.0, size), std::clamp(cy - bh / 2, 0.0, size),
                       std::clamp(cx + bw / 2, 0.0, size), std::clamp(cy + bh / 2, 0.0, size)};
      if (box.x2 <= box.x1 || box.y2 <= box.y1) continue;
      boxes.push_back({image_id, best, box, conf});
    }
  }
  return Nms(std::move(boxes), cfg.nms_iou);
}

DetectionTask::DetectionTask(const Dataset& data, ToyDetConfig cfg)
    : data_(&data), cfg_(cfg) {
  cfg_.validate();
  if (data.config.image_size != cfg_.image_size) {
    throw ConfigError("dataset image size differs from the detector's");
  }
}

nn::Tensor4 DetectionTask::Inputs(std::span<const std::size_t> batch) const {
  std::vector<const Sample*> s;
  for (std::size_t i : batch) s.push_back(&data_->train[i]);
  return ToTensor(s);
}

prune::LossAndGrad DetectionTask::Loss(std::span<const nn::Tensor4> outputs,
                                       std::span<const std::size_t> batch) const {
  std::vector<std::vector<BoxDet>> labels;
  for (std::size_t i : batch) labels.push_back(data_->train[i].labels);
  DetLossResult r = DetLoss(outputs[0], labels, cfg_);
  prune::LossAndGrad out;
  out.loss = r.loss;
  out.output_grads.push_back(std::move(r.grad));
  return out;
}

std::optional<double> DetectionTask::Validate(const graph::GraphModel& model) const {
  return Evaluate(model, data_->val, cfg_).map50;
}

metrics::MetricsReport Evaluate(const graph::GraphModel& model,
                                const std::vector<Sample>& samples,
                                const ToyDetConfig& cfg,
                                const metrics::MetricsOptions& options) {
  constexpr std::size_t kChunk = 32;
  std::vector<BoxDet> dets;
  std::vector<BoxDet> gts;
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    const std::size_t end = std::min(samples.size(), start + kChunk);
    std::vector<const Sample*> chunk;
    for (std::size_t i = start; i < end; ++i) chunk.push_back(&samples[i]);
    const auto outs = graph::RunInference(model, ToTensor(chunk));
    for (std::size_t i = start; i < end; ++i) {
      const int id = static_cast<int>(i);
      for (BoxDet d : DecodeAndNms(outs[0], static_cast<int>(i - start), id, cfg)) {
        dets.push_back(d);
      }
      for (BoxDet g : samples[i].labels) {
        g.image_id = id;
        gts.push_back(g);
      }
    }
  }
  return metrics::MapRange(dets, gts, cfg.classes, options);
}

}  // namespace slimkit::detbench
