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

#include "slimkit/graph/analysis.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "slimkit/graph/graph_io.h"
#include "slimkit/nn/kernels.h"
#include "slimkit/util/errors.h"

namespace slimkit::graph {
namespace {

void RequireValidated(const GraphModel& model) {
  if (model.topo_order().size() != model.nodes.size()) {
    throw StateError("graph '" + model.name + "' has not been validated");
  }
}

std::string Where(const NodeSpec& n) { return "node '" + n.id + "': "; }

std::string DimsStr(const Dims& d) {
  return "(" + std::to_string(d.c) + "," + std::to_string(d.h) + "," +
         std::to_string(d.w) + ")";
}

bool ChannelPreserving(NodeKind k) {
  return k == NodeKind::kSilu || k == NodeKind::kRelu ||
         k == NodeKind::kMaxPool2 || k == NodeKind::kUpsampleNearest2;
}

// Minimal union-find over node indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<Dims> InferShapes(const GraphModel& model,
                              std::optional<InputShape> input) {
  RequireValidated(model);
  const InputShape in = input.value_or(model.input_shape);
  const Dims source{in.c, in.h, in.w};
  std::vector<Dims> dims(model.nodes.size());
  auto dims_of = [&](std::size_t idx) -> const Dims& {
    return idx == GraphModel::kInputIndex ? source : dims[idx];
  };
  auto name_of = [&](std::size_t idx) -> std::string {
    return idx == GraphModel::kInputIndex ? std::string(kGraphInput)
                                          : model.nodes[idx].id;
  };

  for (std::size_t i : model.topo_order()) {
    const NodeSpec& n = model.nodes[i];
    const auto& ins = model.input_indices(i);
    const Dims& first = dims_of(ins.front());
    Dims out = first;
    switch (n.kind) {
      case NodeKind::kConv: {
        if (first.c != n.conv.in_ch) {
          throw ShapeError(Where(n) + "conv expects " +
                           std::to_string(n.conv.in_ch) +
                           " input channels but '" + name_of(ins.front()) +
                           "' produces " + std::to_string(first.c));
        }
        out.c = n.conv.out_ch;
        out.h = nn::ConvOutputExtent(first.h, n.conv.kh, n.conv.stride,
                                     n.conv.pad);
        out.w = nn::ConvOutputExtent(first.w, n.conv.kw, n.conv.stride,
                                     n.conv.pad);
        if (out.h <= 0 || out.w <= 0) {
          throw ShapeError(Where(n) + "kernel does not fit input " +
                           DimsStr(first));
        }
        break;
      }
      case NodeKind::kBatchNorm:
        if (first.c != n.bn_channels) {
          throw ShapeError(Where(n) + "batchnorm has " +
                           std::to_string(n.bn_channels) +
                           " channels but input has " +
                           std::to_string(first.c));
        }
        break;
      case NodeKind::kSilu:
      case NodeKind::kRelu:
        break;
      case NodeKind::kMaxPool2:
        out.h = nn::ConvOutputExtent(first.h, n.pool.kernel, n.pool.stride,
                                     n.pool.pad);
        out.w = nn::ConvOutputExtent(first.w, n.pool.kernel, n.pool.stride,
                                     n.pool.pad);
        if (out.h <= 0 || out.w <= 0) {
          throw ShapeError(Where(n) + "pooling window does not fit input " +
                           DimsStr(first));
        }
        break;
      case NodeKind::kUpsampleNearest2:
        out.h *= 2;
        out.w *= 2;
        break;
      case NodeKind::kConcat: {
        out.c = 0;
        for (std::size_t k : ins) {
          const Dims& d = dims_of(k);
          if (d.h != first.h || d.w != first.w) {
            throw ShapeError(Where(n) + "concat input '" + name_of(k) + "' " +
                             DimsStr(d) + " disagrees spatially with " +
                             DimsStr(first));
          }
          out.c += d.c;
        }
        break;
      }
      case NodeKind::kAdd:
        for (std::size_t k : ins) {
          if (!(dims_of(k) == first)) {
            throw ShapeError(Where(n) + "add inputs " + DimsStr(first) +
                             " and " + DimsStr(dims_of(k)) + " differ");
          }
        }
        break;
      case NodeKind::kDetectHead:
        if (first.c != n.detect.channels()) {
          throw ShapeError(Where(n) + "detect head expects " +
                           std::to_string(n.detect.channels()) +
                           " channels but input has " +
                           std::to_string(first.c));
        }
        break;
    }
    dims[i] = out;
  }
  return dims;
}

std::map<std::string, Dims> InferShapesById(const GraphModel& model,
                                            std::optional<InputShape> input) {
  const auto dims = InferShapes(model, input);
  std::map<std::string, Dims> out;
  for (std::size_t i = 0; i < dims.size(); ++i) out[model.nodes[i].id] = dims[i];
  return out;
}

CostReport CountParams(const GraphModel& model) {
  CostReport r;
  r.input = model.input_shape;
  for (const NodeSpec& n : model.nodes) {
    NodeCost c{n.id};
    if (n.kind == NodeKind::kConv) {
      const auto& a = n.conv;
      c.trainable_params =
          static_cast<std::int64_t>(a.out_ch) * a.in_ch * a.kh * a.kw +
          (a.bias ? a.out_ch : 0);
      c.total_params = c.trainable_params;
    } else if (n.kind == NodeKind::kBatchNorm) {
      c.trainable_params = 2LL * n.bn_channels;
      c.total_params = 4LL * n.bn_channels;
    }
    r.trainable_params += c.trainable_params;
    r.total_params += c.total_params;
    r.nodes.push_back(std::move(c));
  }
  return r;
}

CostReport CountFlops(const GraphModel& model,
                      std::optional<InputShape> input) {
  const auto dims = InferShapes(model, input);
  CostReport r;
  r.input = input.value_or(model.input_shape);
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    const NodeSpec& n = model.nodes[i];
    const Dims& d = dims[i];
    const std::int64_t elems = static_cast<std::int64_t>(d.c) * d.h * d.w;
    NodeCost c{n.id};
    switch (n.kind) {
      case NodeKind::kConv:
        c.flops = 2LL * n.conv.out_ch * n.conv.in_ch * n.conv.kh * n.conv.kw *
                  d.h * d.w;
        break;
      case NodeKind::kBatchNorm:
        c.flops = 2 * elems;
        break;
      case NodeKind::kSilu:
      case NodeKind::kRelu:
        c.flops = elems;
        break;
      case NodeKind::kAdd:
        c.flops = static_cast<std::int64_t>(n.inputs.size() - 1) * elems;
        break;
      default:
        break;
    }
    r.flops += c.flops;
    r.nodes.push_back(std::move(c));
  }
  return r;
}

CostReport AnalyzeCost(const GraphModel& model,
                       std::optional<InputShape> input) {
  CostReport params = CountParams(model);
  CostReport flops = CountFlops(model, input);
  for (std::size_t i = 0; i < params.nodes.size(); ++i) {
    params.nodes[i].flops = flops.nodes[i].flops;
  }
  params.flops = flops.flops;
  params.input = flops.input;
  params.model_size_bytes = static_cast<std::int64_t>(SerializeGraph(model).size());
  return params;
}

std::optional<std::size_t> CouplingAnalysis::group_of(
    const std::string& bn) const {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& m = groups[g].members;
    if (std::find(m.begin(), m.end(), bn) != m.end()) return g;
  }
  return std::nullopt;
}

bool CouplingAnalysis::is_prunable(const std::string& bn) const {
  return std::find(prunable.begin(), prunable.end(), bn) != prunable.end();
}

CouplingAnalysis AnalyzeCoupling(const GraphModel& model) {
  RequireValidated(model);
  const auto dims = InferShapes(model);
  const std::size_t count = model.nodes.size();
  CouplingAnalysis result;
  std::set<std::string> outputs(model.outputs.begin(), model.outputs.end());

  // A batch norm is a candidate when its producer is a conv feeding only it
  // and its channels only reach convs (through channel-preserving ops, adds
  // and concats).
  std::vector<bool> candidate(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    const NodeSpec& n = model.nodes[i];
    if (n.kind != NodeKind::kBatchNorm) continue;
    const std::size_t producer = model.input_indices(i).front();
    if (producer == GraphModel::kInputIndex) continue;
    if (model.nodes[producer].kind != NodeKind::kConv) continue;
    if (model.consumers(producer).size() != 1) continue;
    bool ok = true;
    std::vector<std::size_t> stack{i};
    std::set<std::size_t> seen{i};
    while (!stack.empty() && ok) {
      const std::size_t at = stack.back();
      stack.pop_back();
      if (outputs.contains(model.nodes[at].id)) ok = false;
      for (std::size_t c : model.consumers(at)) {
        const NodeKind k = model.nodes[c].kind;
        if (k == NodeKind::kConv) continue;
        if (ChannelPreserving(k) || k == NodeKind::kAdd ||
            k == NodeKind::kConcat) {
          if (seen.insert(c).second) stack.push_back(c);
        } else {
          ok = false;  // detect head or a batch norm without its own conv
        }
      }
    }
    candidate[i] = ok;
  }

  // Trace each add branch back to the batch norms that define its channels.
  DisjointSets sets(count);
  std::vector<bool> in_group(count, false);
  std::vector<bool> locked_root(count, false);
  std::vector<std::string> reason(count);
  for (std::size_t i : model.topo_order()) {
    const NodeSpec& n = model.nodes[i];
    if (n.kind != NodeKind::kAdd) continue;
    std::vector<std::size_t> sources;
    bool locked = false;
    std::vector<std::size_t> stack(model.input_indices(i).begin(),
                                   model.input_indices(i).end());
    std::set<std::size_t> seen;
    while (!stack.empty()) {
      const std::size_t at = stack.back();
      stack.pop_back();
      if (at == GraphModel::kInputIndex) {
        locked = true;
        continue;
      }
      if (!seen.insert(at).second) continue;
      const NodeKind k = model.nodes[at].kind;
      if (k == NodeKind::kBatchNorm) {
        sources.push_back(at);
        if (!candidate[at]) locked = true;
      } else if (ChannelPreserving(k) || k == NodeKind::kAdd) {
        for (std::size_t up : model.input_indices(at)) stack.push_back(up);
      } else {
        locked = true;
      }
    }
    if (sources.empty()) continue;
    std::sort(sources.begin(), sources.end());
    for (std::size_t s : sources) {
      if (!in_group[s]) reason[s] = n.id;
      in_group[s] = true;
      sets.unite(sources.front(), s);
    }
    if (locked) locked_root[sets.find(sources.front())] = true;
  }

  std::map<std::size_t, std::size_t> group_index;  // root -> group
  std::vector<bool> locked_node(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    if (!in_group[i]) continue;
    const std::size_t root = sets.find(i);
    auto [it, inserted] = group_index.emplace(root, result.groups.size());
    if (inserted) {
      CouplingGroup g;
      g.reason = reason[root];
      result.groups.push_back(std::move(g));
    }
    result.groups[it->second].members.push_back(model.nodes[i].id);
  }
  // Lock flags can sit on stale roots; fold them onto the final roots.
  for (std::size_t i = 0; i < count; ++i) {
    if (locked_root[i]) {
      result.groups[group_index.at(sets.find(i))].locked = true;
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (in_group[i] && !candidate[i]) {
      result.groups[group_index.at(sets.find(i))].locked = true;
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (!in_group[i]) continue;
    locked_node[i] = result.groups[group_index.at(sets.find(i))].locked;
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (candidate[i] && !locked_node[i]) {
      result.prunable.push_back(model.nodes[i].id);
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    const NodeSpec& n = model.nodes[i];
    if (n.kind != NodeKind::kConcat) continue;
    ConcatOffsets co{n.id, {}};
    int offset = 0;
    for (std::size_t k : model.input_indices(i)) {
      const int ch = k == GraphModel::kInputIndex ? model.input_shape.c
                                                  : dims[k].c;
      co.slices.push_back({k == GraphModel::kInputIndex
                               ? std::string(kGraphInput)
                               : model.nodes[k].id,
                           offset, ch});
      offset += ch;
    }
    result.concats.push_back(std::move(co));
  }
  return result;
}

}  // namespace slimkit::graph
