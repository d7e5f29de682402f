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

#ifndef SLIMKIT_NN_LAYER_TENSORS_H_
#define SLIMKIT_NN_LAYER_TENSORS_H_

#include <cstddef>
#include <variant>
#include <vector>

namespace slimkit::nn {

// Convolution weights laid out (out_ch, in_ch, kh, kw). An empty bias means
// the layer has none.
struct ConvParams {
  int out_ch = 0;
  int in_ch = 0;
  int kh = 0;
  int kw = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  bool has_bias() const { return !bias.empty(); }
  std::size_t filter_size() const {
    return static_cast<std::size_t>(in_ch) * kh * kw;
  }
  // Throws ShapeError when buffer lengths disagree with the declared dims.
  void check() const;
  friend bool operator==(const ConvParams&, const ConvParams&) = default;
};

inline constexpr double kDefaultBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

struct BatchNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double eps = kDefaultBatchNormEps;

  int channels() const { return static_cast<int>(gamma.size()); }
  static BatchNormParams identity(int channels);
  // ConfigError for eps <= 0 or negative variance, ShapeError for length
  // mismatches.
  void check() const;
  friend bool operator==(const BatchNormParams&,
                         const BatchNormParams&) = default;
};

using LayerTensors = std::variant<std::monostate, ConvParams, BatchNormParams>;

struct ConvGrads {
  std::vector<double> weight;
  std::vector<double> bias;
};

struct BatchNormGrads {
  std::vector<double> gamma;
  std::vector<double> beta;
};

using LayerGrads = std::variant<std::monostate, ConvGrads, BatchNormGrads>;

}  // namespace slimkit::nn

#endif  // SLIMKIT_NN_LAYER_TENSORS_H_
