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


#include "slimkit/graph/builder.h"

#include <utility>

#include "slimkit/util/errors.h"

namespace slimkit::graph {

GraphBuilder::GraphBuilder(std::string name, InputShape input) {
  model_.name = std::move(name);
  model_.input_shape = input;
  channels_[std::string(kGraphInput)] = input.c;
}

int GraphBuilder::channels(const std::string& id) const {
  auto it = channels_.find(id);
  if (it == channels_.end()) {
    throw ValidationError("builder: unknown node '" + id + "'");
  }
  return it->second;
}

NodeSpec& GraphBuilder::Push(const std::string& id, NodeKind kind,
                             std::vector<std::string> inputs, int channels) {
  if (channels_.contains(id)) {
    throw ValidationError("builder: duplicate node '" + id + "'");
  }
  NodeSpec n;
  n.id = id;
  n.kind = kind;
  n.inputs = std::move(inputs);
  model_.nodes.push_back(std::move(n));
  channels_[id] = channels;
  return model_.nodes.back();
}

std::string GraphBuilder::Conv(const std::string& id, const std::string& input,
                               int out_ch, int k, int stride, int pad,
                               bool bias) {
  NodeSpec& n = Push(id, NodeKind::kConv, {input}, out_ch);
  n.conv = {channels(input), out_ch, k, k, stride, pad, bias};
  return id;
}

std::string GraphBuilder::BatchNorm(const std::string& id,
                                    const std::string& input) {
  const int c = channels(input);
  Push(id, NodeKind::kBatchNorm, {input}, c).bn_channels = c;
  return id;
}

std::string GraphBuilder::Activation(const std::string& id,
                                     const std::string& input, NodeKind kind) {
  Push(id, kind, {input}, channels(input));
  return id;
}

std::string GraphBuilder::MaxPool(const std::string& id,
                                  const std::string& input, PoolAttrs attrs) {
  Push(id, NodeKind::kMaxPool2, {input}, channels(input)).pool = attrs;
  return id;
}

std::string GraphBuilder::Upsample(const std::string& id,
                                   const std::string& input) {
  Push(id, NodeKind::kUpsampleNearest2, {input}, channels(input));
  return id;
}

std::string GraphBuilder::Concat(const std::string& id,
                                 const std::vector<std::string>& inputs) {
  int total = 0;
  for (const std::string& in : inputs) total += channels(in);
  Push(id, NodeKind::kConcat, inputs, total);
  return id;
}

std::string GraphBuilder::Add(const std::string& id,
                              const std::vector<std::string>& inputs) {
  Push(id, NodeKind::kAdd, inputs, channels(inputs.front()));
  return id;
}

std::string GraphBuilder::DetectHead(const std::string& id,
                                     const std::string& input, int classes,
                                     int boxes_per_cell) {
  NodeSpec& n = Push(id, NodeKind::kDetectHead, {input}, channels(input));
  n.detect = {classes, boxes_per_cell};
  return id;
}

std::string GraphBuilder::ConvBnAct(const std::string& prefix,
                                    const std::string& input, int out_ch,
                                    int k, int stride, int pad, NodeKind act) {
  const std::string conv =
      Conv(prefix + ".conv", input, out_ch, k, stride, pad < 0 ? k / 2 : pad);
  const std::string bn = BatchNorm(prefix + ".bn", conv);
  return Activation(prefix + ".act", bn, act);
}

GraphModel GraphBuilder::Build() {
  GraphModel out = model_;
  out.validate();
  return out;
}

}  // namespace slimkit::graph
