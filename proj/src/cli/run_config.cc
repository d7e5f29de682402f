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


#include "slimkit/cli/run_config.h"

#include <set>

#include "json.hpp"
#include "slimkit/util/errors.h"
#include "slimkit/util/runtime_env.h"

namespace slimkit::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads known keys out of one block and rejects the rest.
class Block {
 public:
  Block(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config block '" + name_ + "' must be an object");
  }
  template <typename T>
  void Read(const char* key, T& into) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      into = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + name_ + "." + key + "' has the wrong type");
    }
  }

  void Mark(const char* key) { seen_.insert(key); }

  void Finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + name_ + "." + key + "'");
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void ReadSparse(const json& j, const char* name, prune::SparseConfig& c) {
  Block b(j, name);
  b.Read("lambda", c.lambda);
  b.Read("epochs", c.epochs);
  b.Read("learning_rate", c.learning_rate);
  b.Read("momentum", c.momentum);
  b.Read("batch_size", c.batch_size);
  b.Read("warmup_epochs", c.warmup_epochs);
  b.Read("cosine_decay", c.cosine_decay);
  b.Read("grad_clip", c.grad_clip);
  b.Finish();
}

ordered_json SparseJson(const prune::SparseConfig& c) {
  return {{"lambda", c.lambda},         {"epochs", c.epochs},
          {"learning_rate", c.learning_rate}, {"momentum", c.momentum},
          {"batch_size", c.batch_size}, {"warmup_epochs", c.warmup_epochs},
          {"cosine_decay", c.cosine_decay}, {"grad_clip", c.grad_clip}};
}

}  // namespace

detbench::ToyDetConfig RunConfig::Detector() const {
  detbench::ToyDetConfig d = pipeline.detector;
  d.image_size = pipeline.scene.image_size;
  d.classes = pipeline.scene.classes;
  return d;
}

void RunConfig::validate() const {
  pipeline.validate();
  if (metrics.iou_thresholds.empty()) throw ConfigError("metrics.iou_thresholds is empty");
  for (double t : metrics.iou_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError("IoU thresholds must lie in (0, 1]");
  }
  if (!(metrics.prf_iou > 0.0 && metrics.prf_iou <= 1.0)) {
    throw ConfigError("metrics.prf_iou must lie in (0, 1]");
  }
  if (!hmi_config.empty() && !std::filesystem::is_regular_file(hmi_config)) {
    throw InputError("hmi_config '" + hmi_config.string() + "' does not exist");
  }
}

RunConfig ParseRunConfig(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  RunConfig cfg;
  detbench::PipelineConfig& p = cfg.pipeline;
  Block top(j, "config");
  top.Read("seed", p.seed);
  std::string out = cfg.out.string();
  top.Read("out", out);
  cfg.out = out;
  std::string hmi;
  top.Read("hmi_config", hmi);
  if (!hmi.empty()) {
    cfg.hmi_config = std::filesystem::path(hmi).is_absolute() ? std::filesystem::path(hmi)
                                                               : base_dir / hmi;
  }
  const json empty = json::object();
  auto sub = [&](const char* key) -> const json& {
    top.Mark(key);
    return j.contains(key) ? j.at(key) : empty;
  };
  {
    Block b(sub("scene"), "scene");
    b.Read("image_size", p.scene.image_size);
    b.Read("classes", p.scene.classes);
    b.Read("min_objects", p.scene.min_objects);
    b.Read("max_objects", p.scene.max_objects);
    b.Read("clutter", p.scene.clutter);
    b.Read("noise_sigma", p.scene.noise_sigma);
    b.Finish();
  }
  {
    Block b(sub("data"), "data");
    b.Read("n_train", p.n_train);
    b.Read("n_val", p.n_val);
    b.Finish();
  }
  {
    Block b(sub("detector"), "detector");
    b.Read("base_width", p.detector.base_width);
    b.Read("blocks", p.detector.blocks);
    b.Read("anchor", p.detector.anchor);
    b.Read("conf_threshold", p.detector.conf_threshold);
    b.Read("nms_iou", p.detector.nms_iou);
    b.Finish();
  }
  ReadSparse(sub("train"), "train", p.train);
  ReadSparse(sub("sparse"), "sparse", p.sparse);
  ReadSparse(sub("finetune"), "finetune", p.finetune);
  {
    Block b(sub("prune"), "prune");
    b.Read("rate", p.prune.rate);
    b.Read("min_channels_per_layer", p.prune.min_channels_per_layer);
    b.Read("use_absolute_gamma", p.prune.use_absolute_gamma);
    b.Finish();
  }
  {
    Block b(sub("metrics"), "metrics");
    b.Read("iou_thresholds", cfg.metrics.iou_thresholds);
    b.Read("prf_iou", cfg.metrics.prf_iou);
    b.Read("prf_confidence", cfg.metrics.prf_confidence);
    b.Finish();
  }
  top.Finish();
  // Anchor follows the image size unless set explicitly.
  if (!(j.contains("detector") && j["detector"].contains("anchor"))) {
    p.detector.anchor = p.scene.image_size / 4.0;
  }
  p.PropagateSeed();
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  return ParseRunConfig(ReadFile(path), path.parent_path());
}

std::string RunConfigJson(const RunConfig& cfg) {
  const detbench::PipelineConfig& p = cfg.pipeline;
  ordered_json j{
      {"seed", p.seed},
      {"out", cfg.out.string()},
      {"scene", {{"image_size", p.scene.image_size}, {"classes", p.scene.classes},
                 {"min_objects", p.scene.min_objects}, {"max_objects", p.scene.max_objects},
                 {"clutter", p.scene.clutter}, {"noise_sigma", p.scene.noise_sigma}}},
      {"data", {{"n_train", p.n_train}, {"n_val", p.n_val}}},
      {"detector", {{"base_width", p.detector.base_width}, {"blocks", p.detector.blocks},
                    {"anchor", p.detector.anchor},
                    {"conf_threshold", p.detector.conf_threshold},
                    {"nms_iou", p.detector.nms_iou}}},
      {"train", SparseJson(p.train)},
      {"sparse", SparseJson(p.sparse)},
      {"finetune", SparseJson(p.finetune)},
      {"prune", {{"rate", p.prune.rate},
                 {"min_channels_per_layer", p.prune.min_channels_per_layer},
                 {"use_absolute_gamma", p.prune.use_absolute_gamma}}},
      {"metrics", {{"iou_thresholds", cfg.metrics.iou_thresholds},
                   {"prf_iou", cfg.metrics.prf_iou},
                   {"prf_confidence", cfg.metrics.prf_confidence}}},
      {"hmi_config", cfg.hmi_config.string()}};
  return j.dump(2) + "\n";
}

}  // namespace slimkit::cli
