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

#include "slimkit/nn/tensor.h"

#include <algorithm>
#include <cmath>

#include "slimkit/nn/layer_tensors.h"
#include "slimkit/util/errors.h"

namespace slimkit::nn {

std::string Shape4::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
         std::to_string(h) + "," + std::to_string(w) + ")";
}

Tensor4::Tensor4(Shape4 shape, double fill)
    : shape_(shape), data_(shape.numel(), fill) {
  if (shape.n < 0 || shape.c < 0 || shape.h < 0 || shape.w < 0) {
    throw ShapeError("negative tensor dimension " + shape.str());
  }
}

Tensor4::Tensor4(Shape4 shape, std::vector<double> data)
    : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape.numel()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match dims " + shape.str());
  }
}

bool Tensor4::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void ConvParams::check() const {
  if (out_ch <= 0 || in_ch <= 0 || kh <= 0 || kw <= 0) {
    throw ShapeError("conv dims must be positive");
  }
  const std::size_t expected = static_cast<std::size_t>(out_ch) * filter_size();
  if (weight.size() != expected) {
    throw ShapeError("conv weight length " + std::to_string(weight.size()) +
                     " != " + std::to_string(expected));
  }
  if (!bias.empty() && bias.size() != static_cast<std::size_t>(out_ch)) {
    throw ShapeError("conv bias length " + std::to_string(bias.size()) +
                     " != out_ch " + std::to_string(out_ch));
  }
}

BatchNormParams BatchNormParams::identity(int channels) {
  BatchNormParams p;
  p.gamma.assign(channels, 1.0);
  p.beta.assign(channels, 0.0);
  p.running_mean.assign(channels, 0.0);
  p.running_var.assign(channels, 1.0);
  return p;
}

void BatchNormParams::check() const {
  if (!(eps > 0.0)) throw ConfigError("batchnorm eps must be positive");
  const std::size_t c = gamma.size();
  if (beta.size() != c || running_mean.size() != c ||
      running_var.size() != c) {
    throw ShapeError("batchnorm parameter lengths disagree");
  }
  for (double v : running_var) {
    if (v < 0.0) throw ConfigError("batchnorm running_var is negative");
  }
}

}  // namespace slimkit::nn
