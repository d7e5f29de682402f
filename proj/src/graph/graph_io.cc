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

#include "slimkit/graph/graph_io.h"

#include <json.hpp>

#include "slimkit/graph/analysis.h"
#include "slimkit/util/base64.h"
#include "slimkit/util/errors.h"
#include "slimkit/util/runtime_env.h"

namespace slimkit::graph {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& node, const std::string& field,
                       const std::string& what) {
  throw ParseError("node '" + node + "' field '" + field + "': " + what);
}

template <typename T>
T Field(const json& obj, const std::string& node, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) Fail(node, key, "missing");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    Fail(node, key, e.what());
  }
}

template <typename T>
T FieldOr(const json& obj, const std::string& node, const std::string& key,
          T fallback) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return Field<T>(obj, node, key);
}

std::vector<double> DecodeArray(const json& params, const std::string& node,
                                const std::string& key) {
  if (!params.contains(key)) Fail(node, "params." + key, "missing");
  const json& v = params.at(key);
  if (v.is_string()) {
    auto decoded = DecodeDoubles(v.get<std::string>());
    if (!decoded) Fail(node, "params." + key, "invalid base64 float array");
    return std::move(*decoded);
  }
  if (v.is_array()) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& x : v) {
      if (!x.is_number()) Fail(node, "params." + key, "non-numeric entry");
      out.push_back(x.get<double>());
    }
    return out;
  }
  Fail(node, "params." + key, "expected base64 string or number array");
}

json EncodeArray(const std::vector<double>& values, ParamEncoding enc) {
  if (enc == ParamEncoding::kBase64) return EncodeDoubles(values);
  return json(values);
}

NodeSpec ParseNode(const json& j) {
  if (!j.is_object()) throw ParseError("node entry is not an object");
  NodeSpec n;
  n.id = Field<std::string>(j, "?", "id");
  const auto kind_name = Field<std::string>(j, n.id, "kind");
  auto kind = ParseKind(kind_name);
  if (!kind) Fail(n.id, "kind", "unknown kind '" + kind_name + "'");
  n.kind = *kind;
  n.inputs = Field<std::vector<std::string>>(j, n.id, "inputs");
  const json attrs = j.contains("attrs") ? j.at("attrs") : json::object();
  if (!attrs.is_object()) Fail(n.id, "attrs", "expected object");
  switch (n.kind) {
    case NodeKind::kConv:
      n.conv.in_ch = Field<int>(attrs, n.id, "in_ch");
      n.conv.out_ch = Field<int>(attrs, n.id, "out_ch");
      n.conv.kh = Field<int>(attrs, n.id, "kh");
      n.conv.kw = Field<int>(attrs, n.id, "kw");
      n.conv.stride = FieldOr<int>(attrs, n.id, "stride", 1);
      n.conv.pad = FieldOr<int>(attrs, n.id, "pad", 0);
      n.conv.bias = FieldOr<bool>(attrs, n.id, "bias", false);
      break;
    case NodeKind::kBatchNorm:
      n.bn_channels = Field<int>(attrs, n.id, "channels");
      n.bn_eps = FieldOr<double>(attrs, n.id, "eps", nn::kDefaultBatchNormEps);
      break;
    case NodeKind::kMaxPool2:
      n.pool.kernel = FieldOr<int>(attrs, n.id, "kernel", 2);
      n.pool.stride = FieldOr<int>(attrs, n.id, "stride", n.pool.kernel);
      n.pool.pad = FieldOr<int>(attrs, n.id, "pad", 0);
      break;
    case NodeKind::kDetectHead:
      n.detect.classes = Field<int>(attrs, n.id, "classes");
      n.detect.boxes_per_cell = FieldOr<int>(attrs, n.id, "boxes", 1);
      break;
    default:
      break;
  }
  if (j.contains("params") && !j.at("params").is_null()) {
    const json& p = j.at("params");
    if (!p.is_object()) Fail(n.id, "params", "expected object");
    if (n.kind == NodeKind::kConv) {
      nn::ConvParams cp;
      cp.in_ch = n.conv.in_ch;
      cp.out_ch = n.conv.out_ch;
      cp.kh = n.conv.kh;
      cp.kw = n.conv.kw;
      cp.weight = DecodeArray(p, n.id, "weight");
      if (p.contains("bias")) cp.bias = DecodeArray(p, n.id, "bias");
      n.params = std::move(cp);
    } else if (n.kind == NodeKind::kBatchNorm) {
      nn::BatchNormParams bp;
      bp.gamma = DecodeArray(p, n.id, "gamma");
      bp.beta = DecodeArray(p, n.id, "beta");
      bp.running_mean = DecodeArray(p, n.id, "running_mean");
      bp.running_var = DecodeArray(p, n.id, "running_var");
      bp.eps = n.bn_eps;
      n.params = std::move(bp);
    } else if (!p.empty()) {
      Fail(n.id, "params", "kind takes no parameters");
    }
  }
  return n;
}

json NodeToJson(const NodeSpec& n, ParamEncoding enc) {
  json j;
  j["id"] = n.id;
  j["kind"] = std::string(KindName(n.kind));
  json attrs = json::object();
  switch (n.kind) {
    case NodeKind::kConv:
      attrs["in_ch"] = n.conv.in_ch;
      attrs["out_ch"] = n.conv.out_ch;
      attrs["kh"] = n.conv.kh;
      attrs["kw"] = n.conv.kw;
      attrs["stride"] = n.conv.stride;
      attrs["pad"] = n.conv.pad;
      attrs["bias"] = n.conv.bias;
      break;
    case NodeKind::kBatchNorm:
      attrs["channels"] = n.bn_channels;
      attrs["eps"] = n.bn_eps;
      break;
    case NodeKind::kMaxPool2:
      attrs["kernel"] = n.pool.kernel;
      attrs["stride"] = n.pool.stride;
      attrs["pad"] = n.pool.pad;
      break;
    case NodeKind::kDetectHead:
      attrs["classes"] = n.detect.classes;
      attrs["boxes"] = n.detect.boxes_per_cell;
      break;
    default:
      break;
  }
  j["attrs"] = attrs;
  j["inputs"] = n.inputs;
  if (const auto* cp = std::get_if<nn::ConvParams>(&n.params)) {
    json p;
    p["weight"] = EncodeArray(cp->weight, enc);
    if (cp->has_bias()) p["bias"] = EncodeArray(cp->bias, enc);
    j["params"] = p;
  } else if (const auto* bp = std::get_if<nn::BatchNormParams>(&n.params)) {
    json p;
    p["gamma"] = EncodeArray(bp->gamma, enc);
    p["beta"] = EncodeArray(bp->beta, enc);
    p["running_mean"] = EncodeArray(bp->running_mean, enc);
    p["running_var"] = EncodeArray(bp->running_var, enc);
    j["params"] = p;
  }
  return j;
}

}  // namespace

GraphModel ParseGraph(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph document is not valid JSON: ") +
                     e.what());
  }
  if (!doc.is_object()) throw ParseError("graph document must be an object");
  const auto schema = FieldOr<std::string>(doc, "<graph>", "schema", "");
  if (schema != kGraphSchema) {
    throw ParseError("unsupported graph schema '" + schema + "', expected " +
                     std::string(kGraphSchema));
  }
  GraphModel model;
  model.name = FieldOr<std::string>(doc, "<graph>", "name", "");
  const auto shape = Field<std::vector<int>>(doc, "<graph>", "input_shape");
  if (shape.size() != 3) {
    throw ParseError("field 'input_shape' must be [c, h, w]");
  }
  model.input_shape = {shape[0], shape[1], shape[2]};
  model.classes =
      FieldOr<std::vector<std::string>>(doc, "<graph>", "classes", {});
  model.notes = FieldOr<std::string>(doc, "<graph>", "notes", "");
  if (!doc.contains("nodes") || !doc.at("nodes").is_array()) {
    throw ParseError("field 'nodes' must be an array");
  }
  for (const json& j : doc.at("nodes")) model.nodes.push_back(ParseNode(j));
  model.outputs = Field<std::vector<std::string>>(doc, "<graph>", "outputs");
  model.validate();
  InferShapes(model);
  return model;
}

GraphModel LoadGraph(const std::filesystem::path& path) {
  return ParseGraph(ReadFile(path));
}

std::string SerializeGraph(const GraphModel& model, ParamEncoding encoding) {
  json doc;
  doc["schema"] = std::string(kGraphSchema);
  doc["name"] = model.name;
  doc["input_shape"] = {model.input_shape.c, model.input_shape.h,
                        model.input_shape.w};
  doc["classes"] = model.classes;
  if (!model.notes.empty()) doc["notes"] = model.notes;
  json nodes = json::array();
  for (const NodeSpec& n : model.nodes) nodes.push_back(NodeToJson(n, encoding));
  doc["nodes"] = std::move(nodes);
  doc["outputs"] = model.outputs;
  return doc.dump(1) + "\n";
}

void SaveGraph(const GraphModel& model, const std::filesystem::path& path,
               ParamEncoding encoding) {
  WriteFileAtomic(path, SerializeGraph(model, encoding));
}

}  // namespace slimkit::graph
