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


#include "slimkit/prune/trainer.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "slimkit/graph/executor.h"
#include "slimkit/util/errors.h"
#include "slimkit/util/runtime_env.h"

namespace slimkit::prune {
namespace {

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

bool AllFinite(const std::vector<nn::LayerGrads>& grads) {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  for (const auto& g : grads) {
    if (const auto* c = std::get_if<nn::ConvGrads>(&g)) {
      if (!finite(c->weight) || !finite(c->bias)) return false;
    } else if (const auto* b = std::get_if<nn::BatchNormGrads>(&g)) {
      if (!finite(b->gamma) || !finite(b->beta)) return false;
    }
  }
  return true;
}

template <typename F>
void ForEachGrad(std::vector<nn::LayerGrads>& grads, F&& f) {
  for (auto& g : grads) {
    if (auto* c = std::get_if<nn::ConvGrads>(&g)) {
      for (double& v : c->weight) f(v);
      for (double& v : c->bias) f(v);
    } else if (auto* b = std::get_if<nn::BatchNormGrads>(&g)) {
      for (double& v : b->gamma) f(v);
      for (double& v : b->beta) f(v);
    }
  }
}

void ClipGradNorm(std::vector<nn::LayerGrads>& grads, double max_norm) {
  double sq = 0.0;
  ForEachGrad(grads, [&](double& v) { sq += v * v; });
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double k = max_norm / norm;
  ForEachGrad(grads, [&](double& v) { v *= k; });
}

}  // namespace

void SparseConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
  if (!(grad_clip >= 0.0)) throw ConfigError("grad_clip must be >= 0");
}

double LearningRateAt(const SparseConfig& cfg, std::size_t step,
                      std::size_t steps_per_epoch) {
  const double pos = static_cast<double>(step) + 1.0;
  const double warm = static_cast<double>(cfg.warmup_epochs * steps_per_epoch);
  if (pos <= warm) return cfg.learning_rate * pos / warm;
  if (!cfg.cosine_decay) return cfg.learning_rate;
  const double total = static_cast<double>(cfg.epochs * steps_per_epoch);
  if (total <= warm) return cfg.learning_rate;
  const double t = std::min(1.0, (pos - warm) / (total - warm));
  // Floor at 1% so the last step still moves.
  return cfg.learning_rate * (0.01 + 0.99 * 0.5 * (1.0 + std::cos(std::numbers::pi * t)));
}

GammaStats ComputeGammaStats(const graph::GraphModel& model) {
  std::vector<double> mags;
  for (const graph::NodeSpec& n : model.nodes) {
    if (n.kind != graph::NodeKind::kBatchNorm || !n.has_params()) continue;
    for (double g : n.bn_params().gamma) mags.push_back(std::abs(g));
  }
  GammaStats s;
  s.count = mags.size();
  if (mags.empty()) return s;
  s.sum_abs = std::accumulate(mags.begin(), mags.end(), 0.0);
  s.frac_below_001 =
      static_cast<double>(std::count_if(mags.begin(), mags.end(),
                                        [](double m) { return m < 0.01; })) /
      static_cast<double>(mags.size());
  std::sort(mags.begin(), mags.end());
  const std::size_t mid = mags.size() / 2;
  s.median_abs = mags.size() % 2 ? mags[mid] : 0.5 * (mags[mid - 1] + mags[mid]);
  return s;
}

void AddL1Subgradient(const graph::GraphModel& model,
                      std::vector<nn::LayerGrads>& grads, double lambda) {
  if (lambda == 0.0) return;
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    const graph::NodeSpec& n = model.nodes[i];
    if (n.kind != graph::NodeKind::kBatchNorm) continue;
    auto& g = std::get<nn::BatchNormGrads>(grads.at(i)).gamma;
    const auto& gamma = n.bn_params().gamma;
    for (std::size_t c = 0; c < gamma.size(); ++c) g[c] += lambda * Sign(gamma[c]);
  }
}

TrainResult Train(graph::GraphModel model, const TrainTask& task,
                  const SparseConfig& cfg, bool keep_best) {
  cfg.validate();
  if (task.size() == 0) throw InputError("training set is empty");
  if (!model.all_params_present()) {
    throw StateError("graph '" + model.name + "' has uninitialized parameters");
  }
  TrainResult result;
  if (keep_best) {
    result.best_score = task.Validate(model);
    result.model = model;
  }

  nn::OptState opt{cfg.learning_rate, cfg.momentum, {}};
  std::mt19937_64 rng(ChildSeed(cfg.seed, "shuffle"));
  std::vector<std::size_t> order(task.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t steps_per_epoch =
      (order.size() + cfg.batch_size - 1) / cfg.batch_size;
  std::size_t step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      graph::GraphExecutor ex(model);
      const auto outputs = ex.Forward(task.Inputs(batch), nn::BnMode::kTrain);
      LossAndGrad lg = task.Loss(outputs, batch);
      if (!std::isfinite(lg.loss)) {
        throw TrainingError("loss diverged in epoch " + std::to_string(epoch));
      }
      graph::GraphGradients g = ex.Backward(lg.output_grads);
      // Clip the task gradient only, so the penalty keeps its full weight.
      if (cfg.grad_clip > 0.0) ClipGradNorm(g.params, cfg.grad_clip);
      AddL1Subgradient(model, g.params, cfg.lambda);
      if (!AllFinite(g.params)) {
        throw TrainingError("non-finite gradient in epoch " +
                            std::to_string(epoch));
      }
      opt.learning_rate = LearningRateAt(cfg, step++, steps_per_epoch);
      graph::ApplySgd(model, g.params, opt);
      loss_sum += lg.loss;
      ++batches;
    }
    const GammaStats stats = ComputeGammaStats(model);
    EpochLog entry;
    entry.epoch = epoch;
    entry.median_abs_gamma = stats.median_abs;
    entry.frac_below_001 = stats.frac_below_001;
    entry.task_loss = loss_sum / batches;
    entry.penalty = cfg.lambda * stats.sum_abs;
    if (keep_best) {
      entry.val_score = task.Validate(model);
      // Strictly better only, so ties keep the earlier checkpoint.
      if (entry.val_score &&
          (!result.best_score || *entry.val_score > *result.best_score)) {
        result.best_score = entry.val_score;
        result.best_epoch = epoch;
        result.model = model;
      }
    }
    result.log.push_back(entry);
  }
  if (!keep_best || !result.best_score) {
    result.model = std::move(model);
    result.best_epoch = cfg.epochs;
  }
  return result;
}

TrainResult SparseTrain(graph::GraphModel model, const TrainTask& task,
                        const SparseConfig& cfg) {
  return Train(std::move(model), task, cfg, /*keep_best=*/false);
}

TrainResult FineTune(graph::GraphModel model, const TrainTask& task,
                     const SparseConfig& cfg) {
  if (cfg.lambda != 0.0) {
    throw ConfigError("fine-tuning runs without the sparsity penalty (lambda 0)");
  }
  return Train(std::move(model), task, cfg, /*keep_best=*/true);
}

std::string GammaLogCsv(std::span<const EpochLog> log) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,median_abs_gamma,frac_below_0.01,task_loss,penalty\n";
  for (const EpochLog& e : log) {
    os << e.epoch << ',' << e.median_abs_gamma << ',' << e.frac_below_001 << ','
       << e.task_loss << ',' << e.penalty << '\n';
  }
  return os.str();
}

}  // namespace slimkit::prune
