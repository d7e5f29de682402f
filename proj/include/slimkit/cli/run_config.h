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


// Run configuration for the command-line tool: one JSON document with a
// block per component plus a global seed and output directory.
//
//   {"seed": 0, "out": "runs",
//    "scene": {...}, "detector": {...}, "data": {"n_train", "n_val"},
//    "train": {...}, "sparse": {...}, "finetune": {...},
//    "prune": {"rate", "min_channels_per_layer", "use_absolute_gamma"},
//    "metrics": {"iou_thresholds", "prf_iou", "prf_confidence"},
//    "hmi_config": "path/to/hmi.json"}
//
// Every block and key is optional; unknown keys are rejected. Component
// seeds are always derived from the global seed.

#ifndef SLIMKIT_CLI_RUN_CONFIG_H_
#define SLIMKIT_CLI_RUN_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "slimkit/detbench/pipeline.h"
#include "slimkit/metrics/detection.h"

namespace slimkit::cli {

struct RunConfig {
  detbench::PipelineConfig pipeline;
  metrics::MetricsOptions metrics;
  std::filesystem::path hmi_config;  // empty: default bindings
  std::filesystem::path out = "runs";

  // Detector settings completed from the scene block.
  detbench::ToyDetConfig Detector() const;
  void validate() const;  // throws ConfigError / InputError
};

// Relative hmi_config paths resolve against base_dir.
RunConfig ParseRunConfig(std::string_view json_text,
                         const std::filesystem::path& base_dir = {});
RunConfig LoadRunConfig(const std::filesystem::path& path);
std::string RunConfigJson(const RunConfig& cfg);

}  // namespace slimkit::cli

#endif  // SLIMKIT_CLI_RUN_CONFIG_H_
