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

#ifndef SLIMKIT_GRAPH_GRAPH_MODEL_H_
#define SLIMKIT_GRAPH_GRAPH_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slimkit/nn/layer_tensors.h"

namespace slimkit::graph {

// Reserved id that names the external graph input in a node's input list.
inline constexpr std::string_view kGraphInput = "input";

enum class NodeKind {
  kConv,
  kBatchNorm,
  kSilu,
  kRelu,
  kMaxPool2,
  kUpsampleNearest2,
  kConcat,
  kAdd,
  kDetectHead,
};

std::string_view KindName(NodeKind kind);
std::optional<NodeKind> ParseKind(std::string_view name);

struct ConvAttrs {
  int in_ch = 0;
  int out_ch = 0;
  int kh = 1;
  int kw = 1;
  int stride = 1;
  int pad = 0;
  bool bias = false;
};

// maxpool2 defaults to a 2x2 window with stride 2; the optional fields
// describe the stride-1 padded windows used by SPP-style pooling stacks.
struct PoolAttrs {
  int kernel = 2;
  int stride = 2;
  int pad = 0;
};

struct DetectAttrs {
  int classes = 1;
  int boxes_per_cell = 1;

  int channels() const { return boxes_per_cell * (5 + classes); }
};

struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::kConv;
  ConvAttrs conv;          // kConv
  PoolAttrs pool;          // kMaxPool2
  DetectAttrs detect;      // kDetectHead
  int bn_channels = 0;     // kBatchNorm
  double bn_eps = nn::kDefaultBatchNormEps;
  nn::LayerTensors params;  // monostate when absent
  std::vector<std::string> inputs;

  bool has_params() const {
    return !std::holds_alternative<std::monostate>(params);
  }
  const nn::ConvParams& conv_params() const;
  nn::ConvParams& conv_params();
  const nn::BatchNormParams& bn_params() const;
  nn::BatchNormParams& bn_params();
};

struct InputShape {
  int c = 0;
  int h = 0;
  int w = 0;
  friend bool operator==(const InputShape&, const InputShape&) = default;
};

// A static detector DAG. Nodes may be listed in any order; `topo_order()`
// gives an execution order that is stable (ties resolved by list position).
class GraphModel {
 public:
  std::string name;
  InputShape input_shape;
  std::vector<std::string> classes;
  std::vector<NodeSpec> nodes;
  std::vector<std::string> outputs;
  std::string notes;

  // Checks ids, input references, acyclicity, the single-source rule,
  // reachability, attribute/parameter agreement, and rebuilds the indices.
  // Throws ValidationError (ShapeError for parameter-length problems).
  void validate();

  std::optional<std::size_t> find(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;  // throws ValidationError
  const NodeSpec& node(std::string_view id) const {
    return nodes[index_of(id)];
  }
  NodeSpec& node(std::string_view id) { return nodes[index_of(id)]; }

  // Valid after validate().
  const std::vector<std::size_t>& topo_order() const { return topo_; }
  const std::vector<std::size_t>& consumers(std::size_t node) const {
    return consumers_[node];
  }
  // Indices of a node's inputs; kGraphInput maps to kInputIndex.
  const std::vector<std::size_t>& input_indices(std::size_t node) const {
    return inputs_[node];
  }
  static constexpr std::size_t kInputIndex = static_cast<std::size_t>(-1);

  bool all_params_present() const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> topo_;
  std::vector<std::vector<std::size_t>> consumers_;
  std::vector<std::vector<std::size_t>> inputs_;
};

// Fills every missing parameter set: convs get a seeded Kaiming-uniform
// draw, batch norms start at identity. Existing parameters are untouched.
void InitializeMissingParams(GraphModel& model, std::uint64_t seed);

}  // namespace slimkit::graph

#endif  // SLIMKIT_GRAPH_GRAPH_MODEL_H_
