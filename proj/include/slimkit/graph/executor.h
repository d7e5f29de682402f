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

#ifndef SLIMKIT_GRAPH_EXECUTOR_H_
#define SLIMKIT_GRAPH_EXECUTOR_H_

#include <span>
#include <vector>

#include "slimkit/graph/graph_model.h"
#include "slimkit/nn/kernels.h"
#include "slimkit/nn/sgd.h"

namespace slimkit::graph {

struct GraphGradients {
  std::vector<nn::LayerGrads> params;  // indexed like model.nodes
  nn::Tensor4 input;
};

// Runs a validated graph and keeps exactly one recorded forward pass for the
// following Backward call. The executor borrows the model; train-mode
// forward passes update batch-norm running statistics in place.
class GraphExecutor {
 public:
  explicit GraphExecutor(GraphModel& model);

  // Outputs in model.outputs order.
  std::vector<nn::Tensor4> Forward(const nn::Tensor4& input, nn::BnMode mode);

  // Reverse-mode pass over the recorded forward. `output_grads` pairs with
  // model.outputs; an empty tensor stands for a zero gradient. Every conv
  // and batch-norm node receives a gradient entry (zeros when unreached).
  // Throws StateError when no forward pass has been recorded.
  GraphGradients Backward(std::span<const nn::Tensor4> output_grads);

  void ClearRecord();

 private:
  GraphModel* model_;
  bool recorded_ = false;
  nn::Tensor4 input_;
  std::vector<nn::Tensor4> values_;
  std::vector<nn::BatchNormCache> bn_cache_;
  std::vector<std::vector<std::size_t>> argmax_;
};

// Inference-mode forward on a const model.
std::vector<nn::Tensor4> RunInference(const GraphModel& model,
                                      const nn::Tensor4& input);

// SGD over every conv/batch-norm node of the model.
void ApplySgd(GraphModel& model, const std::vector<nn::LayerGrads>& grads,
              nn::OptState& opt);

}  // namespace slimkit::graph

#endif  // SLIMKIT_GRAPH_EXECUTOR_H_
