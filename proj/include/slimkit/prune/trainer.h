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


// Mini-batch SGD over a graph with an optional L1 penalty on batch-norm
// gammas. Plain training, sparse training and fine-tuning share this loop.

#ifndef SLIMKIT_PRUNE_TRAINER_H_
#define SLIMKIT_PRUNE_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slimkit/graph/graph_model.h"
#include "slimkit/nn/layer_tensors.h"
#include "slimkit/nn/tensor.h"

namespace slimkit::prune {

struct SparseConfig {
  double lambda = 1e-2;
  int epochs = 60;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 32;
  std::uint64_t seed = 0;
  // Linear ramp of the step size over the first warmup_epochs, then a
  // cosine decay to zero by the last step when cosine_decay is set.
  int warmup_epochs = 0;
  bool cosine_decay = false;
  // Rescales the whole gradient when its L2 norm exceeds this; 0 disables.
  double grad_clip = 0.0;

  void validate() const;  // throws ConfigError
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<nn::Tensor4> output_grads;  // pairs with model.outputs
};

// A supervised dataset as the loop sees it.
class TrainTask {
 public:
  virtual ~TrainTask() = default;
  virtual std::size_t size() const = 0;
  virtual nn::Tensor4 Inputs(std::span<const std::size_t> batch) const = 0;
  virtual LossAndGrad Loss(std::span<const nn::Tensor4> outputs,
                           std::span<const std::size_t> batch) const = 0;
  // Held-out score where higher is better (mAP@50 for detection).
  virtual std::optional<double> Validate(const graph::GraphModel&) const {
    return std::nullopt;
  }
};

struct EpochLog {
  int epoch = 0;
  double median_abs_gamma = 0.0;
  double frac_below_001 = 0.0;
  double task_loss = 0.0;  // mean over batches
  double penalty = 0.0;    // lambda * sum |gamma| at epoch end
  std::optional<double> val_score;
};

struct GammaStats {
  double median_abs = 0.0;
  double frac_below_001 = 0.0;
  double sum_abs = 0.0;
  std::size_t count = 0;
};

GammaStats ComputeGammaStats(const graph::GraphModel& model);

// grads[i] += lambda * sign(gamma) for every batch-norm node; sign(0) = 0.
void AddL1Subgradient(const graph::GraphModel& model,
                      std::vector<nn::LayerGrads>& grads, double lambda);

struct TrainResult {
  graph::GraphModel model;
  std::vector<EpochLog> log;
  int best_epoch = 0;  // 0 means the starting weights
  std::optional<double> best_score;
};

// With keep_best, the returned model is the highest-scoring checkpoint
// (starting weights included); otherwise it is the final one.
TrainResult Train(graph::GraphModel model, const TrainTask& task,
                  const SparseConfig& cfg, bool keep_best);

TrainResult SparseTrain(graph::GraphModel model, const TrainTask& task,
                        const SparseConfig& cfg);

// Requires cfg.lambda == 0.
TrainResult FineTune(graph::GraphModel model, const TrainTask& task,
                     const SparseConfig& cfg);

// Step size for a 0-based global step out of total_steps.
double LearningRateAt(const SparseConfig& cfg, std::size_t step,
                      std::size_t steps_per_epoch);

// epoch,median_abs_gamma,frac_below_0.01,task_loss,penalty
std::string GammaLogCsv(std::span<const EpochLog> log);

}  // namespace slimkit::prune

#endif  // SLIMKIT_PRUNE_TRAINER_H_
