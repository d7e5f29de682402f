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


// The desk-scale pipeline in one call: generate data, train a baseline,
// sparse-train it, prune, fine-tune, and evaluate after every stage.

#ifndef SLIMKIT_DETBENCH_PIPELINE_H_
#define SLIMKIT_DETBENCH_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "slimkit/detbench/dataset.h"
#include "slimkit/detbench/toydet.h"
#include "slimkit/graph/graph_model.h"
#include "slimkit/metrics/detection.h"
#include "slimkit/prune/slimming.h"
#include "slimkit/prune/trainer.h"

namespace slimkit::detbench {

// Baseline training from scratch.
prune::SparseConfig DefaultTrainConfig();
// Sparsity-penalized training from the baseline (lambda 1e-2).
prune::SparseConfig DefaultSparseConfig();
// Recovery after pruning (lambda 0).
prune::SparseConfig DefaultFineTuneConfig();

struct PipelineConfig {
  SceneConfig scene;
  int n_train = 200;
  int n_val = 50;
  ToyDetConfig detector;  // image size and classes are taken from scene
  prune::SparseConfig train = DefaultTrainConfig();
  prune::SparseConfig sparse = DefaultSparseConfig();
  prune::SparseConfig finetune = DefaultFineTuneConfig();
  prune::PruneConfig prune{.rate = 0.2};
  std::uint64_t seed = 0;

  // Copies `seed` into every stochastic component through named children.
  void PropagateSeed();
  void validate() const;  // throws ConfigError
};

struct StageResult {
  std::string stage;
  double seconds = 0.0;
  metrics::MetricsReport eval;  // validation split
};

struct PipelineResult {
  graph::GraphModel baseline;
  graph::GraphModel sparse;
  graph::GraphModel pruned;
  graph::GraphModel final_model;
  prune::PruneReport prune_report;
  std::vector<prune::EpochLog> train_log;
  std::vector<prune::EpochLog> sparse_log;
  std::vector<prune::EpochLog> finetune_log;
  std::vector<StageResult> stages;  // baseline, sparse, pruned, final
  double data_seconds = 0.0;
  double total_seconds = 0.0;
};

using ProgressFn = std::function<void(const std::string&)>;

PipelineResult RunPipeline(const PipelineConfig& cfg, const ProgressFn& progress = {});

// True when each mean over consecutive windows of `window` epoch losses is
// below the previous window's mean. A trailing partial window is ignored.
bool WindowedLossDecreasing(const std::vector<prune::EpochLog>& log, int window);

}  // namespace slimkit::detbench

#endif  // SLIMKIT_DETBENCH_PIPELINE_H_
