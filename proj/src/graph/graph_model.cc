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

#include "slimkit/graph/graph_model.h"

#include <array>
#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <utility>

#include "slimkit/util/errors.h"

namespace slimkit::graph {
namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 9> kKindNames{{
    {NodeKind::kConv, "conv"},
    {NodeKind::kBatchNorm, "batchnorm"},
    {NodeKind::kSilu, "silu"},
    {NodeKind::kRelu, "relu"},
    {NodeKind::kMaxPool2, "maxpool2"},
    {NodeKind::kUpsampleNearest2, "upsample_nearest2"},
    {NodeKind::kConcat, "concat"},
    {NodeKind::kAdd, "add"},
    {NodeKind::kDetectHead, "detect_head"},
}};

std::string NodeWhere(const NodeSpec& n) { return "node '" + n.id + "': "; }

void CheckArity(const NodeSpec& n) {
  const std::size_t k = n.inputs.size();
  switch (n.kind) {
    case NodeKind::kConcat:
      if (k < 1) throw ValidationError(NodeWhere(n) + "concat needs inputs");
      break;
    case NodeKind::kAdd:
      if (k < 2) {
        throw ValidationError(NodeWhere(n) + "add needs at least 2 inputs");
      }
      break;
    default:
      if (k != 1) {
        throw ValidationError(NodeWhere(n) + std::string(KindName(n.kind)) +
                              " takes exactly one input, got " +
                              std::to_string(k));
      }
  }
}

void CheckAttrsAndParams(const NodeSpec& n) {
  switch (n.kind) {
    case NodeKind::kConv: {
      const ConvAttrs& a = n.conv;
      if (a.in_ch <= 0 || a.out_ch <= 0 || a.kh <= 0 || a.kw <= 0 ||
          a.stride <= 0 || a.pad < 0) {
        throw ValidationError(NodeWhere(n) + "conv attrs must be positive");
      }
      if (n.has_params()) {
        const auto* p = std::get_if<nn::ConvParams>(&n.params);
        if (p == nullptr) {
          throw ValidationError(NodeWhere(n) + "conv carries non-conv params");
        }
        if (p->in_ch != a.in_ch || p->out_ch != a.out_ch || p->kh != a.kh ||
            p->kw != a.kw) {
          throw ShapeError(NodeWhere(n) + "conv params disagree with attrs");
        }
        if (p->has_bias() != a.bias) {
          throw ShapeError(NodeWhere(n) + "conv bias presence disagrees");
        }
        try {
          p->check();
        } catch (const ShapeError& e) {
          throw ShapeError(NodeWhere(n) + e.what());
        }
      }
      break;
    }
    case NodeKind::kBatchNorm: {
      if (n.bn_channels <= 0) {
        throw ValidationError(NodeWhere(n) + "batchnorm channels must be > 0");
      }
      if (!(n.bn_eps > 0.0)) {
        throw ConfigError(NodeWhere(n) + "batchnorm eps must be positive");
      }
      if (n.has_params()) {
        const auto* p = std::get_if<nn::BatchNormParams>(&n.params);
        if (p == nullptr) {
          throw ValidationError(NodeWhere(n) + "batchnorm carries conv params");
        }
        if (p->channels() != n.bn_channels) {
          throw ShapeError(NodeWhere(n) + "batchnorm has " +
                           std::to_string(p->channels()) +
                           " gammas for " + std::to_string(n.bn_channels) +
                           " channels");
        }
        try {
          p->check();
        } catch (const ValidationError& e) {
          throw ShapeError(NodeWhere(n) + e.what());
        }
      }
      break;
    }
    case NodeKind::kMaxPool2: {
      const PoolAttrs& p = n.pool;
      if (p.kernel <= 0 || p.stride <= 0 || p.pad < 0 || p.pad >= p.kernel) {
        throw ValidationError(NodeWhere(n) + "invalid pooling attrs");
      }
      break;
    }
    case NodeKind::kDetectHead:
      if (n.detect.classes <= 0 || n.detect.boxes_per_cell <= 0) {
        throw ValidationError(NodeWhere(n) +
                              "detect_head needs classes and boxes > 0");
      }
      break;
    default:
      if (n.has_params()) {
        throw ValidationError(NodeWhere(n) + std::string(KindName(n.kind)) +
                              " takes no parameters");
      }
  }
}

}  // namespace

std::string_view KindName(NodeKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<NodeKind> ParseKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const nn::ConvParams& NodeSpec::conv_params() const {
  if (const auto* p = std::get_if<nn::ConvParams>(&params)) return *p;
  throw StateError("node '" + id + "' has no conv parameters");
}
nn::ConvParams& NodeSpec::conv_params() {
  if (auto* p = std::get_if<nn::ConvParams>(&params)) return *p;
  throw StateError("node '" + id + "' has no conv parameters");
}
const nn::BatchNormParams& NodeSpec::bn_params() const {
  if (const auto* p = std::get_if<nn::BatchNormParams>(&params)) return *p;
  throw StateError("node '" + id + "' has no batchnorm parameters");
}
nn::BatchNormParams& NodeSpec::bn_params() {
  if (auto* p = std::get_if<nn::BatchNormParams>(&params)) return *p;
  throw StateError("node '" + id + "' has no batchnorm parameters");
}

std::optional<std::size_t> GraphModel::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it != index_.end() && it->second < nodes.size() &&
      nodes[it->second].id == id) {
    return it->second;
  }
  // The index is stale until validate() runs; fall back to a scan.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t GraphModel::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw ValidationError("unknown node id '" + std::string(id) + "'");
}

bool GraphModel::all_params_present() const {
  for (const NodeSpec& n : nodes) {
    if ((n.kind == NodeKind::kConv || n.kind == NodeKind::kBatchNorm) &&
        !n.has_params()) {
      return false;
    }
  }
  return true;
}

void GraphModel::validate() {
  const std::size_t count = nodes.size();
  if (count == 0) throw ValidationError("graph has no nodes");
  if (input_shape.c <= 0 || input_shape.h <= 0 || input_shape.w <= 0) {
    throw ValidationError("input_shape must be positive");
  }
  index_.clear();
  for (std::size_t i = 0; i < count; ++i) {
    const NodeSpec& n = nodes[i];
    if (n.id.empty() || n.id == kGraphInput) {
      throw ValidationError("invalid node id '" + n.id + "'");
    }
    if (!index_.emplace(n.id, i).second) {
      throw ValidationError("duplicate node id '" + n.id + "'");
    }
  }

  inputs_.assign(count, {});
  consumers_.assign(count, {});
  std::vector<std::size_t> source_nodes;
  std::vector<int> indegree(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const NodeSpec& n = nodes[i];
    CheckArity(n);
    CheckAttrsAndParams(n);
    for (const std::string& in : n.inputs) {
      if (in == kGraphInput) {
        inputs_[i].push_back(kInputIndex);
        if (source_nodes.empty() || source_nodes.back() != i) {
          source_nodes.push_back(i);
        }
        continue;
      }
      auto it = index_.find(in);
      if (it == index_.end()) {
        throw ValidationError(NodeWhere(n) + "input '" + in +
                              "' does not exist");
      }
      inputs_[i].push_back(it->second);
      consumers_[it->second].push_back(i);
      ++indegree[i];
    }
  }
  if (source_nodes.size() != 1) {
    throw ValidationError("exactly one node must consume the graph input, found " +
                          std::to_string(source_nodes.size()));
  }

  // Kahn's algorithm; the min-heap keeps the order stable for listed order.
  topo_.clear();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>>
      ready;
  for (std::size_t i = 0; i < count; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<int> remaining = indegree;
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    topo_.push_back(i);
    for (std::size_t c : consumers_[i]) {
      if (--remaining[c] == 0) ready.push(c);
    }
  }
  if (topo_.size() != count) {
    for (std::size_t i = 0; i < count; ++i) {
      if (remaining[i] > 0) {
        throw ValidationError("graph has a cycle through node '" +
                              nodes[i].id + "'");
      }
    }
  }

  // Every node must be reachable from the single source.
  std::vector<bool> seen(count, false);
  std::vector<std::size_t> stack{source_nodes.front()};
  seen[source_nodes.front()] = true;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t c : consumers_[i]) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!seen[i]) {
      throw ValidationError("node '" + nodes[i].id +
                            "' is not reachable from the graph input");
    }
  }
  if (outputs.empty()) throw ValidationError("graph declares no outputs");
  for (const std::string& out : outputs) {
    if (!index_.contains(out)) {
      throw ValidationError("output '" + out + "' does not exist");
    }
  }
}

void InitializeMissingParams(GraphModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (NodeSpec& n : model.nodes) {
    if (n.has_params()) continue;
    if (n.kind == NodeKind::kConv) {
      nn::ConvParams p;
      p.in_ch = n.conv.in_ch;
      p.out_ch = n.conv.out_ch;
      p.kh = n.conv.kh;
      p.kw = n.conv.kw;
      const double fan_in = static_cast<double>(p.filter_size());
      const double bound = std::sqrt(6.0 / fan_in);
      std::uniform_real_distribution<double> dist(-bound, bound);
      p.weight.resize(static_cast<std::size_t>(p.out_ch) * p.filter_size());
      for (double& w : p.weight) w = dist(rng);
      if (n.conv.bias) p.bias.assign(p.out_ch, 0.0);
      n.params = std::move(p);
    } else if (n.kind == NodeKind::kBatchNorm) {
      nn::BatchNormParams p = nn::BatchNormParams::identity(n.bn_channels);
      p.eps = n.bn_eps;
      n.params = std::move(p);
    }
  }
}

}  // namespace slimkit::graph
