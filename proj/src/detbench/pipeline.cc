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


#include "slimkit/detbench/pipeline.h"

#include <chrono>
#include <cstdio>

#include "slimkit/util/errors.h"
#include "slimkit/util/runtime_env.h"

namespace slimkit::detbench {
namespace {

class Stopwatch {
 public:
  double Lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string Describe(const StageResult& s) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s: mAP@50 %.3f, mAP@50:95 %.3f (%.1f s)",
                s.stage.c_str(), s.eval.map50, s.eval.map50_95, s.seconds);
  return buf;
}

}  // namespace

prune::SparseConfig DefaultTrainConfig() {
  prune::SparseConfig c;
  c.lambda = 0.0;
  c.epochs = 30;
  c.learning_rate = 0.02;
  c.batch_size = 16;
  c.warmup_epochs = 2;
  c.cosine_decay = true;
  c.grad_clip = 10.0;
  return c;
}

prune::SparseConfig DefaultSparseConfig() {
  prune::SparseConfig c;
  c.lambda = 1e-2;
  c.epochs = 10;
  c.learning_rate = 0.02;
  c.batch_size = 4;
  c.warmup_epochs = 1;
  c.grad_clip = 10.0;
  return c;
}

prune::SparseConfig DefaultFineTuneConfig() {
  prune::SparseConfig c;
  c.lambda = 0.0;
  c.epochs = 10;
  c.learning_rate = 0.01;
  c.batch_size = 16;
  c.warmup_epochs = 1;
  c.cosine_decay = true;
  c.grad_clip = 10.0;
  return c;
}

void PipelineConfig::PropagateSeed() {
  scene.seed = ChildSeed(seed, "data");
  train.seed = ChildSeed(seed, "train");
  sparse.seed = ChildSeed(seed, "sparse");
  finetune.seed = ChildSeed(seed, "finetune");
}

void PipelineConfig::validate() const {
  scene.validate();
  if (n_train < 1 || n_val < 1) throw ConfigError("n_train and n_val must be >= 1");
  ToyDetConfig d = detector;
  d.image_size = scene.image_size;
  d.classes = scene.classes;
  d.validate();
  train.validate();
  sparse.validate();
  finetune.validate();
  if (finetune.lambda != 0.0) throw ConfigError("fine-tuning requires lambda 0");
  prune.validate();
}

PipelineResult RunPipeline(const PipelineConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  auto say = [&](const std::string& msg) {
    if (progress) progress(msg);
  };
  Stopwatch total;
  Stopwatch lap;
  PipelineResult out;

  const Dataset data = GenerateDataset(cfg.scene, cfg.n_train, cfg.n_val);
  out.data_seconds = lap.Lap();
  ToyDetConfig det = cfg.detector;
  det.image_size = cfg.scene.image_size;
  det.classes = cfg.scene.classes;
  const DetectionTask task(data, det);

  auto record = [&](const std::string& stage, const graph::GraphModel& m, double secs) {
    StageResult s{stage, secs, Evaluate(m, data.val, det)};
    say(Describe(s));
    out.stages.push_back(std::move(s));
  };

  say("training baseline");
  prune::TrainResult base = prune::Train(BuildToyDet(det, ChildSeed(cfg.seed, "init")),
                                         task, cfg.train, /*keep_best=*/true);
  out.baseline = std::move(base.model);
  out.train_log = std::move(base.log);
  record("baseline", out.baseline, lap.Lap());

  say("sparse training");
  prune::TrainResult sparse = prune::SparseTrain(out.baseline, task, cfg.sparse);
  out.sparse = std::move(sparse.model);
  out.sparse_log = std::move(sparse.log);
  record("sparse", out.sparse, lap.Lap());

  prune::PruneResult pruned = prune::Prune(out.sparse, cfg.prune);
  out.pruned = std::move(pruned.model);
  out.prune_report = pruned.report;
  record("pruned", out.pruned, lap.Lap());

  say("fine-tuning");
  prune::TrainResult ft = prune::FineTune(out.pruned, task, cfg.finetune);
  out.final_model = std::move(ft.model);
  out.finetune_log = std::move(ft.log);
  record("final", out.final_model, lap.Lap());
  out.total_seconds = total.Lap();
  return out;
}

bool WindowedLossDecreasing(const std::vector<prune::EpochLog>& log, int window) {
  if (window < 1) throw ConfigError("window must be >= 1");
  double prev = 0.0;
  for (std::size_t start = 0; start + window <= log.size(); start += window) {
    double sum = 0.0;
    for (int k = 0; k < window; ++k) sum += log[start + k].task_loss;
    const double mean = sum / window;
    if (start > 0 && !(mean < prev)) return false;
    prev = mean;
  }
  return true;
}

}  // namespace slimkit::detbench
