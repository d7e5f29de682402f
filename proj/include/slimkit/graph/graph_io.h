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

// Graph documents (schema "slimkit_graph_v1"):
//
//   {"schema": "slimkit_graph_v1", "name": ..., "input_shape": [c, h, w],
//    "classes": [...], "notes": ...,
//    "nodes": [{"id", "kind", "attrs": {...}, "inputs": [...],
//               "params": {...}}],
//    "outputs": [...]}
//
// Each params array is either a base64 string of little-endian binary64
// values or an inline JSON number array. Nodes without "params" are
// topology-only and can be filled by InitializeMissingParams.

#ifndef SLIMKIT_GRAPH_GRAPH_IO_H_
#define SLIMKIT_GRAPH_GRAPH_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "slimkit/graph/graph_model.h"

namespace slimkit::graph {

inline constexpr std::string_view kGraphSchema = "slimkit_graph_v1";

enum class ParamEncoding { kBase64, kInline };

// Parses, validates and shape-checks a document. ParseError names the node
// and field at fault; structural problems raise ValidationError.
GraphModel ParseGraph(std::string_view json_text);
GraphModel LoadGraph(const std::filesystem::path& path);

std::string SerializeGraph(const GraphModel& model,
                           ParamEncoding encoding = ParamEncoding::kBase64);
// Written atomically (temp file + rename).
void SaveGraph(const GraphModel& model, const std::filesystem::path& path,
               ParamEncoding encoding = ParamEncoding::kBase64);

}  // namespace slimkit::graph

#endif  // SLIMKIT_GRAPH_GRAPH_IO_H_
