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


// Programmatic graph construction. Channel counts are tracked per node so
// conv in_ch and batch-norm widths never have to be spelled out.

#ifndef SLIMKIT_GRAPH_BUILDER_H_
#define SLIMKIT_GRAPH_BUILDER_H_

#include <map>
#include <string>
#include <vector>

#include "slimkit/graph/graph_model.h"

namespace slimkit::graph {

class GraphBuilder {
 public:
  GraphBuilder(std::string name, InputShape input);

  // Each method returns the id it was given so calls can be chained.
  std::string Conv(const std::string& id, const std::string& input, int out_ch,
                   int k, int stride = 1, int pad = 0, bool bias = false);
  std::string BatchNorm(const std::string& id, const std::string& input);
  std::string Activation(const std::string& id, const std::string& input,
                         NodeKind kind = NodeKind::kSilu);
  std::string MaxPool(const std::string& id, const std::string& input,
                      PoolAttrs attrs = {});
  std::string Upsample(const std::string& id, const std::string& input);
  std::string Concat(const std::string& id,
                     const std::vector<std::string>& inputs);
  std::string Add(const std::string& id, const std::vector<std::string>& inputs);
  std::string DetectHead(const std::string& id, const std::string& input,
                         int classes, int boxes_per_cell);

  // conv (no bias) -> batchnorm -> activation named prefix.conv/.bn/.act;
  // `pad` defaults to k/2.
  std::string ConvBnAct(const std::string& prefix, const std::string& input,
                        int out_ch, int k, int stride = 1, int pad = -1,
                        NodeKind act = NodeKind::kSilu);

  void Output(const std::string& id) { model_.outputs.push_back(id); }
  void SetClasses(std::vector<std::string> classes) {
    model_.classes = std::move(classes);
  }
  void SetNotes(std::string notes) { model_.notes = std::move(notes); }

  int channels(const std::string& id) const;

  // Validates and returns the graph; parameters stay absent until
  // InitializeMissingParams.
  GraphModel Build();

 private:
  NodeSpec& Push(const std::string& id, NodeKind kind,
                 std::vector<std::string> inputs, int channels);

  GraphModel model_;
  std::map<std::string, int> channels_;
};

}  // namespace slimkit::graph

#endif  // SLIMKIT_GRAPH_BUILDER_H_
