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


// Synthetic shape-detection dataset: generation, PNG + label files on disk,
// and conversion to network input.

#ifndef SLIMKIT_DETBENCH_DATASET_H_
#define SLIMKIT_DETBENCH_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "slimkit/metrics/detection.h"
#include "slimkit/nn/tensor.h"

namespace slimkit::detbench {

inline constexpr int kMaxShapeClasses = 6;

struct SceneConfig {
  int image_size = 96;
  int classes = 4;
  int min_objects = 1;
  int max_objects = 3;
  double clutter = 0.1;  // in [0, 1]
  double noise_sigma = 0.02;  // fraction of full scale
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// square, disc, triangle, cross, diamond, ring
const std::vector<std::string>& ShapeNames();

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

struct Sample {
  std::string name;
  Image image;
  std::vector<metrics::BoxDet> labels;  // pixel boxes, tight
};

struct Dataset {
  SceneConfig config;
  std::vector<Sample> train;
  std::vector<Sample> val;
};

// Pure in (cfg, n_train, n_val); each image draws from its own named seed.
Dataset GenerateDataset(const SceneConfig& cfg, int n_train, int n_val);

// Layout: manifest.json, train/NNNN.png + .txt, val/NNNN.png + .txt.
void SaveDataset(const Dataset& data, const std::filesystem::path& dir);
Dataset LoadDataset(const std::filesystem::path& dir);
std::string ManifestJson(const Dataset& data);

std::vector<std::uint8_t> EncodePng(const Image& image);
Image DecodePng(const std::vector<std::uint8_t>& bytes);

// Channels RGB scaled to [0, 1], one batch slot per sample.
nn::Tensor4 ToTensor(const std::vector<const Sample*>& samples);

}  // namespace slimkit::detbench

#endif  // SLIMKIT_DETBENCH_DATASET_H_
