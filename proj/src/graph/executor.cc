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

#include "slimkit/graph/executor.h"

#include <string>

#include "slimkit/util/errors.h"

namespace slimkit::graph {
namespace {

struct ForwardState {
  std::vector<nn::Tensor4> values;
  std::vector<nn::BatchNormCache> bn_cache;
  std::vector<std::vector<std::size_t>> argmax;
};

// Shared by the recording executor and const inference. `mutable_model` is
// only touched in train mode (running statistics).
void RunNodes(const GraphModel& model, GraphModel* mutable_model,
              const nn::Tensor4& input, nn::BnMode mode, bool record,
              ForwardState& st) {
  if (model.topo_order().size() != model.nodes.size()) {
    throw StateError("graph '" + model.name + "' has not been validated");
  }
  if (input.c() != model.input_shape.c) {
    throw ShapeError("graph input has " + std::to_string(input.c()) +
                     " channels, model expects " +
                     std::to_string(model.input_shape.c));
  }
  const std::size_t count = model.nodes.size();
  st.values.assign(count, {});
  st.bn_cache.assign(record ? count : 0, {});
  st.argmax.assign(record ? count : 0, {});

  // Intermediate values are released after their last consumer unless the
  // pass is recorded for backward.
  std::vector<int> pending(count, 0);
  std::vector<bool> is_output(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    pending[i] = static_cast<int>(model.consumers(i).size());
  }
  for (const std::string& out : model.outputs) is_output[model.index_of(out)] = true;

  auto value_of = [&](std::size_t idx) -> const nn::Tensor4& {
    return idx == GraphModel::kInputIndex ? input : st.values[idx];
  };

  for (std::size_t i : model.topo_order()) {
    const NodeSpec& n = model.nodes[i];
    const auto& ins = model.input_indices(i);
    const nn::Tensor4& x = value_of(ins.front());
    nn::Tensor4 y;
    switch (n.kind) {
      case NodeKind::kConv:
        y = nn::Conv2dForward(x, n.conv_params(), {n.conv.stride, n.conv.pad},
                              n.id);
        break;
      case NodeKind::kBatchNorm: {
        nn::BatchNormCache* cache = record ? &st.bn_cache[i] : nullptr;
        if (mode == nn::BnMode::kTrain) {
          y = nn::BatchNormForward(x, mutable_model->nodes[i].bn_params(),
                                   mode, cache, n.id);
        } else {
          y = nn::BatchNormInference(x, n.bn_params(), cache, n.id);
        }
        break;
      }
      case NodeKind::kSilu:
        y = nn::SiluForward(x);
        break;
      case NodeKind::kRelu:
        y = nn::ReluForward(x);
        break;
      case NodeKind::kMaxPool2:
        y = nn::MaxPoolForward(x, {n.pool.kernel, n.pool.stride, n.pool.pad},
                               record ? &st.argmax[i] : nullptr, n.id);
        break;
      case NodeKind::kUpsampleNearest2:
        y = nn::UpsampleNearest2Forward(x);
        break;
      case NodeKind::kConcat:
      case NodeKind::kAdd: {
        std::vector<const nn::Tensor4*> parts;
        parts.reserve(ins.size());
        for (std::size_t k : ins) parts.push_back(&value_of(k));
        y = n.kind == NodeKind::kConcat ? nn::ConcatForward(parts, n.id)
                                        : nn::AddForward(parts, n.id);
        break;
      }
      case NodeKind::kDetectHead:
        if (x.c() != n.detect.channels()) {
          throw ShapeError("node '" + n.id + "': detect head expects " +
                           std::to_string(n.detect.channels()) +
                           " channels, got " + std::to_string(x.c()));
        }
        y = x;
        break;
    }
    st.values[i] = std::move(y);
    if (!record) {
      for (std::size_t k : ins) {
        if (k == GraphModel::kInputIndex) continue;
        if (--pending[k] == 0 && !is_output[k]) st.values[k] = nn::Tensor4();
      }
    }
  }
}

void Accumulate(nn::Tensor4& into, nn::Tensor4&& grad) {
  if (into.size() == 0) {
    into = std::move(grad);
    return;
  }
  double* dst = into.data();
  const double* src = grad.data();
  for (std::size_t i = 0; i < into.size(); ++i) dst[i] += src[i];
}

nn::LayerGrads ZeroGradsFor(const NodeSpec& n) {
  if (const auto* cp = std::get_if<nn::ConvParams>(&n.params)) {
    nn::ConvGrads g;
    g.weight.assign(cp->weight.size(), 0.0);
    g.bias.assign(cp->bias.size(), 0.0);
    return g;
  }
  if (const auto* bp = std::get_if<nn::BatchNormParams>(&n.params)) {
    nn::BatchNormGrads g;
    g.gamma.assign(bp->gamma.size(), 0.0);
    g.beta.assign(bp->beta.size(), 0.0);
    return g;
  }
  return std::monostate{};
}

}  // namespace

GraphExecutor::GraphExecutor(GraphModel& model) : model_(&model) {}

void GraphExecutor::ClearRecord() {
  recorded_ = false;
  input_ = nn::Tensor4();
  values_.clear();
  bn_cache_.clear();
  argmax_.clear();
}

std::vector<nn::Tensor4> GraphExecutor::Forward(const nn::Tensor4& input,
                                                nn::BnMode mode) {
  ClearRecord();
  ForwardState st;
  RunNodes(*model_, model_, input, mode, /*record=*/true, st);
  values_ = std::move(st.values);
  bn_cache_ = std::move(st.bn_cache);
  argmax_ = std::move(st.argmax);
  input_ = input;
  recorded_ = true;
  std::vector<nn::Tensor4> outs;
  for (const std::string& id : model_->outputs) {
    outs.push_back(values_[model_->index_of(id)]);
  }
  return outs;
}

GraphGradients GraphExecutor::Backward(
    std::span<const nn::Tensor4> output_grads) {
  if (!recorded_) {
    throw StateError("backward called before a recorded forward pass");
  }
  const GraphModel& model = *model_;
  if (output_grads.size() != model.outputs.size()) {
    throw ShapeError("backward expects " + std::to_string(model.outputs.size()) +
                     " output gradients, got " +
                     std::to_string(output_grads.size()));
  }
  const std::size_t count = model.nodes.size();
  std::vector<nn::Tensor4> grads(count);
  GraphGradients result;
  result.params.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    result.params[i] = ZeroGradsFor(model.nodes[i]);
  }
  for (std::size_t k = 0; k < output_grads.size(); ++k) {
    if (output_grads[k].size() == 0) continue;
    const std::size_t idx = model.index_of(model.outputs[k]);
    if (output_grads[k].shape() != values_[idx].shape()) {
      throw ShapeError("gradient for output '" + model.outputs[k] +
                       "' has shape " + output_grads[k].shape().str() +
                       ", output is " + values_[idx].shape().str());
    }
    nn::Tensor4 g = output_grads[k];
    Accumulate(grads[idx], std::move(g));
  }

  auto send = [&](std::size_t target, nn::Tensor4&& g) {
    if (target == GraphModel::kInputIndex) {
      Accumulate(result.input, std::move(g));
    } else {
      Accumulate(grads[target], std::move(g));
    }
  };
  auto value_of = [&](std::size_t idx) -> const nn::Tensor4& {
    return idx == GraphModel::kInputIndex ? input_ : values_[idx];
  };

  const auto& order = model.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t i = *it;
    if (grads[i].size() == 0) continue;
    const NodeSpec& n = model.nodes[i];
    const auto& ins = model.input_indices(i);
    nn::Tensor4 g = std::move(grads[i]);
    const nn::Tensor4& x = value_of(ins.front());
    switch (n.kind) {
      case NodeKind::kConv: {
        auto r = nn::Conv2dBackward(x, n.conv_params(),
                                    {n.conv.stride, n.conv.pad}, g,
                                    /*want_input_grad=*/true);
        result.params[i] = std::move(r.grads);
        send(ins.front(), std::move(r.input_grad));
        break;
      }
      case NodeKind::kBatchNorm: {
        auto r = nn::BatchNormBackward(g, n.bn_params(), bn_cache_[i]);
        result.params[i] = std::move(r.grads);
        send(ins.front(), std::move(r.input_grad));
        break;
      }
      case NodeKind::kSilu:
        send(ins.front(), nn::SiluBackward(x, g));
        break;
      case NodeKind::kRelu:
        send(ins.front(), nn::ReluBackward(x, g));
        break;
      case NodeKind::kMaxPool2:
        send(ins.front(), nn::MaxPoolBackward(x.shape(), argmax_[i], g));
        break;
      case NodeKind::kUpsampleNearest2:
        send(ins.front(), nn::UpsampleNearest2Backward(g));
        break;
      case NodeKind::kConcat: {
        std::vector<int> channels;
        for (std::size_t k : ins) channels.push_back(value_of(k).c());
        auto parts = nn::ConcatBackward(g, channels);
        for (std::size_t k = 0; k < ins.size(); ++k) {
          send(ins[k], std::move(parts[k]));
        }
        break;
      }
      case NodeKind::kAdd:
        for (std::size_t k = 0; k < ins.size(); ++k) {
          nn::Tensor4 copy = g;
          send(ins[k], std::move(copy));
        }
        break;
      case NodeKind::kDetectHead:
        send(ins.front(), std::move(g));
        break;
    }
  }
  if (result.input.size() == 0) result.input = nn::Tensor4(input_.shape());
  return result;
}

std::vector<nn::Tensor4> RunInference(const GraphModel& model,
                                      const nn::Tensor4& input) {
  ForwardState st;
  RunNodes(model, nullptr, input, nn::BnMode::kInference, /*record=*/false, st);
  std::vector<nn::Tensor4> outs;
  for (const std::string& id : model.outputs) {
    outs.push_back(st.values[model.index_of(id)]);
  }
  return outs;
}

void ApplySgd(GraphModel& model, const std::vector<nn::LayerGrads>& grads,
              nn::OptState& opt) {
  std::vector<nn::LayerTensors*> params;
  params.reserve(model.nodes.size());
  for (NodeSpec& n : model.nodes) params.push_back(&n.params);
  nn::SgdStep(params, grads, opt);
}

}  // namespace slimkit::graph
