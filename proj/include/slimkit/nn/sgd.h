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

#ifndef SLIMKIT_NN_SGD_H_
#define SLIMKIT_NN_SGD_H_

#include <span>
#include <vector>

#include "slimkit/nn/layer_tensors.h"

namespace slimkit::nn {

// Classic (non-Nesterov) momentum SGD:
//   v <- momentum * v + grad
//   p <- p - learning_rate * v
// Velocity buffers are created lazily on the first step and afterwards must
// keep mirroring the parameter shapes.
struct OptState {
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::vector<LayerGrads> velocity;

  void validate() const;
};

// One update over a parameter list. `params[i]` pairs with `grads[i]`; a
// monostate gradient leaves the parameter untouched.
void SgdStep(std::span<LayerTensors* const> params,
             std::span<const LayerGrads> grads, OptState& opt);

}  // namespace slimkit::nn

#endif  // SLIMKIT_NN_SGD_H_
