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


#include "slimkit/prune/slimming.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "slimkit/graph/graph_io.h"
#include "slimkit/util/errors.h"

namespace slimkit::prune {
namespace {

using graph::GraphModel;
using graph::NodeKind;
using graph::NodeSpec;

double GammaValue(double g, const PruneConfig& cfg) {
  return cfg.use_absolute_gamma ? std::abs(g) : g;
}

std::vector<std::string> PrunableOrThrow(const GraphModel& model) {
  bool any_bn = false;
  for (const NodeSpec& n : model.nodes) any_bn |= n.kind == NodeKind::kBatchNorm;
  if (!any_bn) {
    throw UnprunableModelError("graph '" + model.name + "' has no batch norms");
  }
  auto prunable = graph::AnalyzeCoupling(model).prunable;
  if (prunable.empty()) {
    throw UnprunableModelError("graph '" + model.name +
                               "' has no prunable batch norms");
  }
  return prunable;
}

const std::vector<double>& Gammas(const GraphModel& model, const std::string& id) {
  const NodeSpec& n = model.node(id);
  if (!n.has_params()) {
    throw StateError("batch norm '" + id + "' has no parameters");
  }
  return n.bn_params().gamma;
}

std::vector<int> KeptIndices(const std::vector<bool>& keep) {
  std::vector<int> out;
  for (std::size_t c = 0; c < keep.size(); ++c) {
    if (keep[c]) out.push_back(static_cast<int>(c));
  }
  return out;
}

std::vector<int> AllIndices(int n) {
  std::vector<int> out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<double> Gather(const std::vector<double>& v,
                           const std::vector<int>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[i]);
  return out;
}

nn::ConvParams SliceConv(const nn::ConvParams& p, const std::vector<int>& outs,
                         const std::vector<int>& ins) {
  nn::ConvParams q;
  q.out_ch = static_cast<int>(outs.size());
  q.in_ch = static_cast<int>(ins.size());
  q.kh = p.kh;
  q.kw = p.kw;
  const std::size_t taps = static_cast<std::size_t>(p.kh) * p.kw;
  q.weight.reserve(outs.size() * ins.size() * taps);
  for (int o : outs) {
    for (int i : ins) {
      const double* src =
          p.weight.data() + (static_cast<std::size_t>(o) * p.in_ch + i) * taps;
      q.weight.insert(q.weight.end(), src, src + taps);
    }
  }
  if (p.has_bias()) q.bias = Gather(p.bias, outs);
  return q;
}

std::string FirstDifference(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> sa(a.begin(), a.end());
  std::set<int> sb(b.begin(), b.end());
  for (int c : sa) {
    if (!sb.contains(c)) return std::to_string(c);
  }
  for (int c : sb) {
    if (!sa.contains(c)) return std::to_string(c);
  }
  return "?";
}

}  // namespace

void PruneConfig::validate() const {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("pruning rate must lie in [0, 1), got " +
                      std::to_string(rate));
  }
  if (min_channels_per_layer < 1) {
    throw ConfigError("min_channels_per_layer must be >= 1");
  }
}

std::vector<GammaEntry> CollectSortedGammas(const GraphModel& model,
                                            const PruneConfig& cfg) {
  std::vector<GammaEntry> out;
  for (const std::string& id : PrunableOrThrow(model)) {
    const auto& g = Gammas(model, id);
    for (std::size_t c = 0; c < g.size(); ++c) {
      out.push_back({GammaValue(g[c], cfg), id, static_cast<int>(c)});
    }
  }
  std::sort(out.begin(), out.end(), [](const GammaEntry& a, const GammaEntry& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.node != b.node) return a.node < b.node;
    return a.channel < b.channel;
  });
  return out;
}

double MaxThresholdGuard(const GraphModel& model, const PruneConfig& cfg) {
  double guard = std::numeric_limits<double>::infinity();
  for (const std::string& id : PrunableOrThrow(model)) {
    double layer_max = -std::numeric_limits<double>::infinity();
    for (double g : Gammas(model, id)) layer_max = std::max(layer_max, GammaValue(g, cfg));
    guard = std::min(guard, layer_max);
  }
  return guard;
}

Threshold PruningThreshold(std::span<const double> sorted, double rate) {
  if (sorted.empty()) throw InputError("pruning threshold of an empty gamma list");
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("pruning rate must lie in [0, 1), got " +
                      std::to_string(rate));
  }
  const double raw = std::floor(static_cast<double>(sorted.size()) * rate);
  const std::size_t index =
      std::min(static_cast<std::size_t>(raw), sorted.size() - 1);
  return {index, sorted[index]};
}

Threshold PruningThreshold(std::span<const GammaEntry> sorted, double rate) {
  std::vector<double> values;
  values.reserve(sorted.size());
  for (const GammaEntry& e : sorted) values.push_back(e.value);
  return PruningThreshold(values, rate);
}

ChannelMask BuildMasks(const GraphModel& model, double threshold, double guard,
                       const PruneConfig& cfg) {
  cfg.validate();
  const graph::CouplingAnalysis coupling = graph::AnalyzeCoupling(model);
  const double cut = std::min(threshold, guard);
  ChannelMask mask;
  for (const std::string& id : coupling.prunable) {
    const auto& g = Gammas(model, id);
    std::vector<bool> keep(g.size());
    for (std::size_t c = 0; c < g.size(); ++c) keep[c] = !(GammaValue(g[c], cfg) < cut);
    mask[id] = std::move(keep);
  }

  auto union_groups = [&] {
    for (const graph::CouplingGroup& group : coupling.groups) {
      if (group.locked) continue;
      std::vector<bool> merged(mask.at(group.members.front()).size(), false);
      for (const std::string& m : group.members) {
        const auto& k = mask.at(m);
        for (std::size_t c = 0; c < k.size(); ++c) merged[c] = merged[c] || k[c];
      }
      for (const std::string& m : group.members) mask[m] = merged;
    }
  };
  union_groups();

  bool restored = false;
  for (auto& [id, keep] : mask) {
    const int want = std::min<int>(cfg.min_channels_per_layer,
                                   static_cast<int>(keep.size()));
    int have = static_cast<int>(std::count(keep.begin(), keep.end(), true));
    if (have >= want) continue;
    const auto& g = Gammas(model, id);
    std::vector<int> order = AllIndices(static_cast<int>(keep.size()));
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return GammaValue(g[a], cfg) > GammaValue(g[b], cfg);
    });
    for (int c : order) {
      if (have >= want) break;
      if (!keep[c]) {
        keep[c] = true;
        ++have;
      }
    }
    restored = true;
  }
  if (restored) union_groups();
  return mask;
}

GraphModel ApplyMasks(const GraphModel& model, const ChannelMask& mask) {
  const graph::CouplingAnalysis coupling = graph::AnalyzeCoupling(model);
  const auto dims = graph::InferShapes(model);
  for (const auto& [id, keep] : mask) {
    const auto idx = model.find(id);
    if (!idx || model.nodes[*idx].kind != NodeKind::kBatchNorm) {
      throw SurgeryError("mask names '" + id + "', which is not a batch norm");
    }
    if (!coupling.is_prunable(id)) {
      throw SurgeryError("batch norm '" + id + "' is not prunable");
    }
    if (static_cast<int>(keep.size()) != dims[*idx].c) {
      throw SurgeryError("mask for '" + id + "' has " +
                         std::to_string(keep.size()) + " entries, layer has " +
                         std::to_string(dims[*idx].c) + " channels");
    }
    if (std::find(keep.begin(), keep.end(), true) == keep.end()) {
      throw SurgeryError("mask for '" + id + "' removes every channel");
    }
  }

  const std::size_t count = model.nodes.size();
  std::vector<std::vector<int>> kept(count);
  const std::vector<int> input_kept = AllIndices(model.input_shape.c);
  auto kept_of = [&](std::size_t i) -> const std::vector<int>& {
    return i == GraphModel::kInputIndex ? input_kept : kept[i];
  };
  auto dim_of = [&](std::size_t i) {
    return i == GraphModel::kInputIndex ? model.input_shape.c : dims[i].c;
  };

  GraphModel out = model;
  for (std::size_t i : model.topo_order()) {
    const NodeSpec& n = model.nodes[i];
    NodeSpec& m = out.nodes[i];
    const auto& ins = model.input_indices(i);
    const std::vector<int>& in0 = kept_of(ins.front());
    switch (n.kind) {
      case NodeKind::kConv: {
        std::vector<int> outs = AllIndices(n.conv.out_ch);
        const auto& cons = model.consumers(i);
        if (cons.size() == 1) {
          auto it = mask.find(model.nodes[cons.front()].id);
          if (it != mask.end()) outs = KeptIndices(it->second);
        }
        m.conv.in_ch = static_cast<int>(in0.size());
        m.conv.out_ch = static_cast<int>(outs.size());
        if (n.has_params()) m.params = SliceConv(n.conv_params(), outs, in0);
        kept[i] = std::move(outs);
        break;
      }
      case NodeKind::kBatchNorm: {
        auto it = mask.find(n.id);
        if (it != mask.end() && KeptIndices(it->second) != in0) {
          throw SurgeryError("batch norm '" + n.id + "' channel " +
                             FirstDifference(KeptIndices(it->second), in0) +
                             " disagrees with its producer");
        }
        m.bn_channels = static_cast<int>(in0.size());
        if (n.has_params()) {
          const nn::BatchNormParams& p = n.bn_params();
          nn::BatchNormParams q;
          q.gamma = Gather(p.gamma, in0);
          q.beta = Gather(p.beta, in0);
          q.running_mean = Gather(p.running_mean, in0);
          q.running_var = Gather(p.running_var, in0);
          q.eps = p.eps;
          m.params = std::move(q);
        }
        kept[i] = in0;
        break;
      }
      case NodeKind::kSilu:
      case NodeKind::kRelu:
      case NodeKind::kMaxPool2:
      case NodeKind::kUpsampleNearest2:
        kept[i] = in0;
        break;
      case NodeKind::kAdd:
        for (std::size_t k : ins) {
          if (kept_of(k) != in0) {
            throw SurgeryError("add '" + n.id + "': channel " +
                               FirstDifference(kept_of(k), in0) +
                               " is kept on one branch and removed on another");
          }
        }
        kept[i] = in0;
        break;
      case NodeKind::kConcat: {
        int offset = 0;
        for (std::size_t k : ins) {
          for (int c : kept_of(k)) kept[i].push_back(offset + c);
          offset += dim_of(k);
        }
        break;
      }
      case NodeKind::kDetectHead:
        if (static_cast<int>(in0.size()) != dim_of(ins.front())) {
          throw SurgeryError("detect head '" + n.id +
                             "' would lose input channels");
        }
        kept[i] = in0;
        break;
    }
  }
  for (const std::string& id : model.outputs) {
    const std::size_t i = model.index_of(id);
    if (static_cast<int>(kept[i].size()) != dims[i].c) {
      throw SurgeryError("graph output '" + id + "' would lose channels");
    }
  }
  out.validate();
  graph::InferShapes(out);
  return out;
}

PruneResult Prune(const GraphModel& model, const PruneConfig& cfg) {
  cfg.validate();
  const auto sorted = CollectSortedGammas(model, cfg);
  const double guard = MaxThresholdGuard(model, cfg);
  const Threshold th = PruningThreshold(sorted, cfg.rate);

  PruneResult r;
  r.mask = BuildMasks(model, th.value, guard, cfg);
  r.model = ApplyMasks(model, r.mask);

  PruneReport& rep = r.report;
  rep.rate = cfg.rate;
  rep.sorted_count = sorted.size();
  rep.threshold_index = th.index;
  rep.threshold = th.value;
  rep.guard = guard;
  rep.effective_threshold = std::min(th.value, guard);
  for (const auto& [id, keep] : r.mask) {
    const int kept = static_cast<int>(std::count(keep.begin(), keep.end(), true));
    rep.layers.push_back({id, kept, static_cast<int>(keep.size())});
    rep.channels_before += static_cast<int>(keep.size());
    rep.channels_after += kept;
  }
  // Mask keys are sorted by id; report layers in graph order instead.
  std::sort(rep.layers.begin(), rep.layers.end(),
            [&](const LayerKeep& a, const LayerKeep& b) {
              return model.index_of(a.node) < model.index_of(b.node);
            });
  const graph::CostReport before = graph::AnalyzeCost(model);
  const graph::CostReport after = graph::AnalyzeCost(r.model);
  rep.params_before = before.trainable_params;
  rep.params_after = after.trainable_params;
  rep.total_params_before = before.total_params;
  rep.total_params_after = after.total_params;
  rep.flops_before = before.flops;
  rep.flops_after = after.flops;
  rep.size_before = before.model_size_bytes;
  rep.size_after = after.model_size_bytes;
  return r;
}

std::string PruneReportJson(const PruneReport& r) {
  nlohmann::ordered_json j;
  j["rate"] = r.rate;
  j["sorted_gamma_count"] = r.sorted_count;
  j["threshold_index"] = r.threshold_index;
  j["pruning_threshold"] = r.threshold;
  j["guard"] = r.guard;
  j["effective_threshold"] = r.effective_threshold;
  j["channels_before"] = r.channels_before;
  j["channels_after"] = r.channels_after;
  j["params_before"] = r.params_before;
  j["params_after"] = r.params_after;
  j["total_params_before"] = r.total_params_before;
  j["total_params_after"] = r.total_params_after;
  j["flops_before"] = r.flops_before;
  j["flops_after"] = r.flops_after;
  j["model_size_before"] = r.size_before;
  j["model_size_after"] = r.size_after;
  auto& layers = j["layers"] = nlohmann::ordered_json::array();
  for (const LayerKeep& l : r.layers) {
    layers.push_back({{"node", l.node}, {"kept", l.kept}, {"total", l.total}});
  }
  return j.dump(2) + "\n";
}

}  // namespace slimkit::prune
