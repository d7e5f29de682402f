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


// Single-scale grid detector over the synthetic shapes: graph construction,
// loss, decoding with NMS, and the training/evaluation glue.

#ifndef SLIMKIT_DETBENCH_TOYDET_H_
#define SLIMKIT_DETBENCH_TOYDET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slimkit/detbench/dataset.h"
#include "slimkit/graph/graph_model.h"
#include "slimkit/metrics/detection.h"
#include "slimkit/prune/trainer.h"

namespace slimkit::detbench {

// Per-cell head layout: [dx, dy, log(w/anchor), log(h/anchor), objectness,
// class logits...]. dx and dy are the centre offset inside the cell in
// [0, 1] and are regressed linearly.
inline constexpr int kBoxChannels = 4;
inline constexpr int kObjChannel = 4;
inline constexpr int kClassOffset = 5;

struct ToyDetConfig {
  int image_size = 96;
  int base_width = 16;
  int blocks = 3;  // stride-2 stages; grid stride = 2^blocks
  int classes = 4;
  double anchor = 24.0;  // pixels
  double conf_threshold = 0.01;
  double nms_iou = 0.5;

  int stride() const { return 1 << blocks; }
  int grid() const { return image_size / stride(); }
  void validate() const;  // throws ConfigError
};

// stem + (blocks - 1) further stride-2 conv-BN-SiLU stages, one residual
// block and one plain block at the final stride, then a 1x1 head.
graph::GraphModel BuildToyDet(const ToyDetConfig& cfg, std::uint64_t seed);

struct LossWeights {
  double objectness = 1.0;
  double classes = 1.0;
  double box = 5.0;
};

struct DetLossResult {
  double loss = 0.0;
  nn::Tensor4 grad;
};

// Sums over cells and averages over the batch. labels[b] are pixel boxes
// for batch slot b; each object is assigned to the cell holding its centre.
DetLossResult DetLoss(const nn::Tensor4& raw,
                      std::span<const std::vector<metrics::BoxDet>> labels,
                      const ToyDetConfig& cfg, const LossWeights& w = {});

// One image's head output (batch slot `slot`) to clipped boxes, then
// per-class greedy NMS. image_id is copied into every detection.
std::vector<metrics::BoxDet> DecodeAndNms(const nn::Tensor4& raw, int slot,
                                          int image_id, const ToyDetConfig& cfg);

// Greedy per-class suppression of boxes with IoU > threshold against an
// already kept, higher-confidence box.
std::vector<metrics::BoxDet> Nms(std::vector<metrics::BoxDet> boxes,
                                 double iou_threshold);

class DetectionTask : public prune::TrainTask {
 public:
  DetectionTask(const Dataset& data, ToyDetConfig cfg);

  std::size_t size() const override { return data_->train.size(); }
  nn::Tensor4 Inputs(std::span<const std::size_t> batch) const override;
  prune::LossAndGrad Loss(std::span<const nn::Tensor4> outputs,
                          std::span<const std::size_t> batch) const override;
  std::optional<double> Validate(const graph::GraphModel& model) const override;

 private:
  const Dataset* data_;
  ToyDetConfig cfg_;
};

// Inference over `samples` in chunks, decode + NMS, then metrics.
metrics::MetricsReport Evaluate(const graph::GraphModel& model,
                                const std::vector<Sample>& samples,
                                const ToyDetConfig& cfg,
                                const metrics::MetricsOptions& options = {});

ToyDetConfig ToyDetConfigFor(const SceneConfig& scene);

}  // namespace slimkit::detbench

#endif  // SLIMKIT_DETBENCH_TOYDET_H_
