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


// Batch-norm channel slimming: gamma ranking, threshold selection, mask
// construction and the graph surgery that removes masked channels.

#ifndef SLIMKIT_PRUNE_SLIMMING_H_
#define SLIMKIT_PRUNE_SLIMMING_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slimkit/graph/analysis.h"
#include "slimkit/graph/graph_model.h"

namespace slimkit::prune {

struct PruneConfig {
  double rate = 0.0;
  int min_channels_per_layer = 1;
  bool use_absolute_gamma = true;

  void validate() const;  // throws ConfigError
};

struct GammaEntry {
  double value = 0.0;
  std::string node;
  int channel = 0;
};

// Keep-vector per batch-norm id. Batch norms absent from the map keep
// every channel.
using ChannelMask = std::map<std::string, std::vector<bool>>;

// Gammas of every prunable batch norm, ascending, ties by (node id, channel).
// Throws UnprunableModelError when the model has none.
std::vector<GammaEntry> CollectSortedGammas(const graph::GraphModel& model,
                                            const PruneConfig& cfg);

// min over prunable layers of max gamma (absolute unless raw mode).
double MaxThresholdGuard(const graph::GraphModel& model, const PruneConfig& cfg);

struct Threshold {
  std::size_t index = 0;
  double value = 0.0;
};

// index = floor(n * rate) clamped to n - 1; throws InputError when empty.
Threshold PruningThreshold(std::span<const GammaEntry> sorted, double rate);
Threshold PruningThreshold(std::span<const double> sorted, double rate);

// Drops channels with gamma < min(threshold, guard), unions keeps across
// coupling groups, then restores the largest gammas of any layer left below
// min_channels_per_layer.
ChannelMask BuildMasks(const graph::GraphModel& model, double threshold,
                       double guard, const PruneConfig& cfg);

// Returns a new validated graph with masked channels removed from batch
// norms, their producing convs, and every downstream conv input slice.
graph::GraphModel ApplyMasks(const graph::GraphModel& model,
                             const ChannelMask& mask);

struct LayerKeep {
  std::string node;
  int kept = 0;
  int total = 0;
};

struct PruneReport {
  double rate = 0.0;
  std::size_t sorted_count = 0;
  std::size_t threshold_index = 0;
  double threshold = 0.0;
  double guard = 0.0;
  double effective_threshold = 0.0;  // min(threshold, guard)
  int channels_before = 0;
  int channels_after = 0;
  std::vector<LayerKeep> layers;
  std::int64_t params_before = 0;
  std::int64_t params_after = 0;
  std::int64_t total_params_before = 0;
  std::int64_t total_params_after = 0;
  std::int64_t flops_before = 0;
  std::int64_t flops_after = 0;
  std::int64_t size_before = 0;
  std::int64_t size_after = 0;
};

struct PruneResult {
  graph::GraphModel model;
  PruneReport report;
  ChannelMask mask;
};

// collect -> guard -> threshold -> masks -> surgery. The input is untouched.
PruneResult Prune(const graph::GraphModel& model, const PruneConfig& cfg);

std::string PruneReportJson(const PruneReport& report);

}  // namespace slimkit::prune

#endif  // SLIMKIT_PRUNE_SLIMMING_H_
