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

// Static analyses over a validated GraphModel: shape inference, parameter
// and FLOP accounting, and the channel-coupling structure pruning relies on.

#ifndef SLIMKIT_GRAPH_ANALYSIS_H_
#define SLIMKIT_GRAPH_ANALYSIS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slimkit/graph/graph_model.h"

namespace slimkit::graph {

struct Dims {
  int c = 0;
  int h = 0;
  int w = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

// Output dims per node, indexed like model.nodes. Throws ShapeError naming
// the first inconsistent node in execution order.
std::vector<Dims> InferShapes(const GraphModel& model,
                              std::optional<InputShape> input = std::nullopt);
std::map<std::string, Dims> InferShapesById(
    const GraphModel& model, std::optional<InputShape> input = std::nullopt);

struct NodeCost {
  std::string id;
  std::int64_t trainable_params = 0;
  std::int64_t total_params = 0;  // includes batch-norm running statistics
  std::int64_t flops = 0;
};

// Totals always equal the sum over `nodes`.
struct CostReport {
  std::vector<NodeCost> nodes;
  std::int64_t trainable_params = 0;
  std::int64_t total_params = 0;
  std::int64_t flops = 0;
  std::int64_t model_size_bytes = 0;
  InputShape input;
};

// conv: out*in*kh*kw (+out with bias). batchnorm: 2*ch trainable, 4*ch total.
CostReport CountParams(const GraphModel& model);

// A multiply-add counts as 2 FLOPs. conv: 2*out*in*kh*kw*Ho*Wo;
// batchnorm: 2*c*H*W; silu/relu: 1 per element; add: (inputs-1) per element;
// pooling, upsampling, concat and the detect head: 0.
CostReport CountFlops(const GraphModel& model,
                      std::optional<InputShape> input = std::nullopt);

// Params and FLOPs plus the byte count of the serialized graph document.
CostReport AnalyzeCost(const GraphModel& model,
                       std::optional<InputShape> input = std::nullopt);

// Batch norms whose outputs meet at an elementwise add and must therefore
// keep identical channel sets. A group is locked when one of the add's
// branches does not originate at a prunable batch norm (for example a conv
// without normalization); locked groups are never pruned.
struct CouplingGroup {
  std::vector<std::string> members;
  std::string reason;  // id of the first add junction that joined them
  bool locked = false;
};

struct ConcatSlice {
  std::string producer;
  int offset = 0;
  int channels = 0;
};

struct ConcatOffsets {
  std::string concat;
  std::vector<ConcatSlice> slices;
};

struct CouplingAnalysis {
  std::vector<CouplingGroup> groups;
  std::vector<ConcatOffsets> concats;
  // Batch norms whose channels may be removed: fed by a conv with no other
  // consumer, never flowing into a detect head or graph output, and not in a
  // locked group. Listed in model order.
  std::vector<std::string> prunable;

  // Group index of a batch norm, if it belongs to one.
  std::optional<std::size_t> group_of(const std::string& bn) const;
  bool is_prunable(const std::string& bn) const;
};

CouplingAnalysis AnalyzeCoupling(const GraphModel& model);

}  // namespace slimkit::graph

#endif  // SLIMKIT_GRAPH_ANALYSIS_H_
