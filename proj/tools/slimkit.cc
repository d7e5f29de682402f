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


// Command-line entry point. Exit codes: 0 success, 1 usage or validation
// error, 2 runtime error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slimkit/cli/run_config.h"
#include "slimkit/detbench/dataset.h"
#include "slimkit/detbench/pipeline.h"
#include "slimkit/detbench/toydet.h"
#include "slimkit/graph/analysis.h"
#include "slimkit/graph/graph_io.h"
#include "slimkit/hmi/controller.h"
#include "slimkit/hmi/replay.h"
#include "slimkit/prune/slimming.h"
#include "slimkit/prune/trainer.h"
#include "slimkit/util/errors.h"
#include "slimkit/util/runtime_env.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace slimkit {
namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<double> rates;
  std::optional<double> lambda;
  std::optional<int> epochs;
  std::string data;
  std::string model;
  std::string split = "val";
  std::string events;
  std::string script;
  std::string adapter = "mock";
  double latency_ms = 0.0;
  bool replay = false;
  std::vector<int> input;
};

void Say(const std::string& s) { std::cout << s << std::endl; }

cli::RunConfig BuildConfig(const Options& o) {
  cli::RunConfig cfg = o.config.empty() ? cli::ParseRunConfig("{}") : cli::LoadRunConfig(o.config);
  if (o.seed) {
    cfg.pipeline.seed = *o.seed;
    cfg.pipeline.PropagateSeed();
  }
  if (!o.out.empty()) cfg.out = o.out;
  if (o.lambda) cfg.pipeline.sparse.lambda = *o.lambda;
  return cfg;
}

void RequireFile(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string("--") + what + " is required");
  if (!fs::exists(path)) throw InputError(std::string(what) + " '" + path + "' does not exist");
}

// Detector decoding settings for a dataset: image size and classes come
// from the data, the rest from the run config.
detbench::ToyDetConfig DetectorFor(const cli::RunConfig& cfg, const detbench::Dataset& data,
                                   const graph::GraphModel& model) {
  detbench::ToyDetConfig d = cfg.pipeline.detector;
  d.image_size = data.config.image_size;
  d.classes = data.config.classes;
  bool has_head = false;
  for (const graph::NodeSpec& n : model.nodes) {
    if (n.kind != graph::NodeKind::kDetectHead) continue;
    has_head = true;
    if (n.detect.classes != d.classes) {
      throw InputError("model predicts " + std::to_string(n.detect.classes) +
                       " classes, dataset has " + std::to_string(d.classes));
    }
  }
  if (!has_head) throw InputError("model '" + model.name + "' has no detect head");
  if (model.input_shape.h != d.image_size) {
    throw InputError("model input size differs from the dataset image size");
  }
  return d;
}

std::string EvalJson(const metrics::MetricsReport& r, const graph::GraphModel& m) {
  return metrics::MetricsReportJson(r, m.classes);
}

std::string RateTag(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "r%.2f", rate);
  return buf;
}

std::string CostJson(const graph::CostReport& c) {
  ordered_json nodes = ordered_json::array();
  for (const graph::NodeCost& n : c.nodes) {
    nodes.push_back({{"id", n.id}, {"trainable_params", n.trainable_params},
                     {"total_params", n.total_params}, {"flops", n.flops}});
  }
  ordered_json j{{"input_shape", {c.input.c, c.input.h, c.input.w}},
                 {"trainable_params", c.trainable_params},
                 {"total_params", c.total_params},
                 {"flops", c.flops},
                 {"gflops", static_cast<double>(c.flops) / 1e9},
                 {"model_size_bytes", c.model_size_bytes},
                 {"nodes", nodes}};
  return j.dump(2) + "\n";
}

std::string Summary(const metrics::MetricsReport& r) {
  char buf[200];
  std::snprintf(buf, sizeof(buf), "mAP@50 %.4f  mAP@50:95 %.4f  P %.2f%%  R %.2f%%  F1 %.2f%%",
                r.map50, r.map50_95, 100 * r.prf.precision, 100 * r.prf.recall, 100 * r.prf.f_score);
  return buf;
}

void WriteTrainArtifacts(const fs::path& out, const graph::GraphModel& m,
                         const prune::TrainResult& r, const metrics::MetricsReport& eval,
                         const std::string& log_name) {
  graph::SaveGraph(m, out / "model.json");
  WriteFileAtomic(out / log_name, prune::GammaLogCsv(r.log));
  WriteFileAtomic(out / "metrics.json", EvalJson(eval, m));
  Say("wrote " + (out / "model.json").string());
  Say(Summary(eval));
}

int GenData(const Options& o) {
  const cli::RunConfig cfg = BuildConfig(o);
  cfg.validate();
  const auto& p = cfg.pipeline;
  const detbench::Dataset d = detbench::GenerateDataset(p.scene, p.n_train, p.n_val);
  detbench::SaveDataset(d, cfg.out);
  Say("wrote " + std::to_string(d.train.size()) + " train / " + std::to_string(d.val.size()) +
      " val images to " + cfg.out.string());
  return 0;
}

// Shared by train, sparse-train and finetune.
int TrainStage(const Options& o, const std::string& stage) {
  cli::RunConfig cfg = BuildConfig(o);
  cfg.validate();
  RequireFile(o.data, "data");
  const detbench::Dataset data = detbench::LoadDataset(o.data);
  prune::SparseConfig tc = stage == "train" ? cfg.pipeline.train
                           : stage == "sparse-train" ? cfg.pipeline.sparse
                                                     : cfg.pipeline.finetune;
  if (o.epochs) tc.epochs = *o.epochs;
  if (stage == "finetune" && o.lambda) tc.lambda = *o.lambda;
  tc.validate();

  graph::GraphModel model;
  if (stage == "train" && o.model.empty()) {
    detbench::ToyDetConfig d = cfg.pipeline.detector;
    d.image_size = data.config.image_size;
    d.classes = data.config.classes;
    model = detbench::BuildToyDet(d, ChildSeed(cfg.pipeline.seed, "init"));
  } else {
    RequireFile(o.model, "model");
    model = graph::LoadGraph(o.model);
  }
  const detbench::ToyDetConfig det = DetectorFor(cfg, data, model);
  const detbench::DetectionTask task(data, det);
  Say(stage + ": " + std::to_string(tc.epochs) + " epochs on " +
      std::to_string(data.train.size()) + " images");
  prune::TrainResult r;
  if (stage == "train") {
    r = prune::Train(std::move(model), task, tc, /*keep_best=*/true);
  } else if (stage == "sparse-train") {
    r = prune::SparseTrain(std::move(model), task, tc);
  } else {
    r = prune::FineTune(std::move(model), task, tc);
  }
  const auto eval = detbench::Evaluate(r.model, data.val, det, cfg.metrics);
  WriteTrainArtifacts(cfg.out, r.model, r, eval,
                      stage == "sparse-train" ? "gamma_log.csv" : stage + "_log.csv");
  return 0;
}

int PruneCmd(const Options& o) {
  const cli::RunConfig cfg = BuildConfig(o);
  cfg.validate();
  RequireFile(o.model, "model");
  const graph::GraphModel model = graph::LoadGraph(o.model);
  std::vector<double> rates = o.rates;
  if (rates.empty()) rates.push_back(cfg.pipeline.prune.rate);
  ordered_json sweep = ordered_json::array();
  std::printf("%-6s %12s %12s %14s %14s\n", "rate", "params", "params_after", "flops",
              "flops_after");
  for (double rate : rates) {
    prune::PruneConfig pc = cfg.pipeline.prune;
    pc.rate = rate;
    const prune::PruneResult r = prune::Prune(model, pc);
    const std::string tag = RateTag(rate);
    graph::SaveGraph(r.model, cfg.out / ("pruned_" + tag + ".json"));
    const std::string report = prune::PruneReportJson(r.report);
    WriteFileAtomic(cfg.out / ("prune_report_" + tag + ".json"), report);
    sweep.push_back(ordered_json::parse(report));
    std::printf("%-6.2f %12lld %12lld %14lld %14lld\n", rate,
                static_cast<long long>(r.report.params_before),
                static_cast<long long>(r.report.params_after),
                static_cast<long long>(r.report.flops_before),
                static_cast<long long>(r.report.flops_after));
  }
  WriteFileAtomic(cfg.out / "prune_sweep.json", sweep.dump(2) + "\n");
  return 0;
}

int EvalCmd(const Options& o) {
  const cli::RunConfig cfg = BuildConfig(o);
  cfg.validate();
  RequireFile(o.data, "data");
  RequireFile(o.model, "model");
  const detbench::Dataset data = detbench::LoadDataset(o.data);
  const graph::GraphModel model = graph::LoadGraph(o.model);
  if (o.split != "val" && o.split != "train") throw InputError("--split must be val or train");
  const auto& samples = o.split == "val" ? data.val : data.train;
  const auto r = detbench::Evaluate(model, samples, DetectorFor(cfg, data, model), cfg.metrics);
  const std::string json = EvalJson(r, model);
  WriteFileAtomic(cfg.out / "metrics.json", json);
  std::cout << json;
  return 0;
}

int ReportCost(const Options& o) {
  const cli::RunConfig cfg = BuildConfig(o);
  RequireFile(o.model, "model");
  const graph::GraphModel model = graph::LoadGraph(o.model);
  std::optional<graph::InputShape> input;
  if (!o.input.empty()) {
    if (o.input.size() != 3) throw InputError("--input takes C H W");
    input = graph::InputShape{o.input[0], o.input[1], o.input[2]};
  }
  const std::string json = CostJson(graph::AnalyzeCost(model, input));
  WriteFileAtomic(cfg.out / "cost.json", json);
  std::cout << json;
  return 0;
}

int GraphValidate(const Options& o) {
  RequireFile(o.model, "model");
  const graph::GraphModel model = graph::LoadGraph(o.model);
  const graph::CostReport cost = graph::AnalyzeCost(model);
  const graph::CouplingAnalysis cp = graph::AnalyzeCoupling(model);
  std::printf("%s: valid, %zu nodes, %lld trainable params, %.3f GFLOPs at %dx%dx%d\n",
              model.name.c_str(), model.nodes.size(),
              static_cast<long long>(cost.trainable_params), cost.flops / 1e9,
              model.input_shape.c, model.input_shape.h, model.input_shape.w);
  std::printf("prunable batch norms: %zu, coupling groups: %zu, params %s\n",
              cp.prunable.size(), cp.groups.size(),
              model.all_params_present() ? "present" : "absent (topology only)");
  return 0;
}

int HmiRun(const Options& o) {
  const cli::RunConfig cfg = BuildConfig(o);
  cfg.validate();
  const hmi::HmiConfig hc = cfg.hmi_config.empty()
                                ? hmi::HmiConfig{}
                                : hmi::ParseHmiConfig(ReadFile(cfg.hmi_config));
  std::vector<hmi::GestureEvent> stream;
  std::vector<hmi::Trial> script;
  bool scripted = false;
  if (o.replay) {
    hmi::ReplaySpec spec;
    spec.misses = hmi::ReferenceMisses();
    spec.seed = ChildSeed(cfg.pipeline.seed, "hmi");
    hmi::ScriptedSession s = hmi::BuildScriptedSession(hc.bindings, spec);
    stream = std::move(s.stream);
    script = std::move(s.script);
    scripted = true;
    WriteFileAtomic(cfg.out / "replay_events.jsonl", hmi::FormatEventStream(stream));
  } else {
    RequireFile(o.events, "events");
    stream = hmi::ParseEventStream(ReadFile(o.events));
  }
  if (!o.script.empty()) {
    RequireFile(o.script, "script");
    script = hmi::ParseTrialScript(ReadFile(o.script));
    scripted = true;
  }
  std::unique_ptr<hmi::PlayerAdapter> adapter;
  if (o.adapter == "mock") {
    adapter = std::make_unique<hmi::MockAdapter>(
        std::chrono::microseconds(static_cast<long long>(o.latency_ms * 1000)));
  } else if (o.adapter == "command") {
    if (hc.commands.empty()) throw ConfigError("command adapter needs \"commands\" in hmi_config");
    adapter = std::make_unique<hmi::CommandAdapter>(hc.commands);
  } else {
    throw InputError("--adapter must be mock or command");
  }
  const hmi::SessionReport r =
      hmi::RunSession(stream, hc.bindings, *adapter, scripted ? &script : nullptr);
  WriteFileAtomic(cfg.out / "session_report.json", hmi::SessionReportJson(r));
  const std::string table = hmi::SessionReportTable(r);
  WriteFileAtomic(cfg.out / "session_table.txt", table);
  std::cout << table;
  return 0;
}

int PipelineCmd(const Options& o) {
  cli::RunConfig cfg = BuildConfig(o);
  if (o.epochs) cfg.pipeline.train.epochs = *o.epochs;
  if (!o.rates.empty()) cfg.pipeline.prune.rate = o.rates.front();
  cfg.validate();
  const detbench::PipelineResult r = detbench::RunPipeline(cfg.pipeline, Say);
  graph::SaveGraph(r.baseline, cfg.out / "baseline.json");
  graph::SaveGraph(r.sparse, cfg.out / "sparse.json");
  graph::SaveGraph(r.pruned, cfg.out / "pruned.json");
  graph::SaveGraph(r.final_model, cfg.out / "final.json");
  WriteFileAtomic(cfg.out / "gamma_log.csv", prune::GammaLogCsv(r.sparse_log));
  WriteFileAtomic(cfg.out / "prune_report.json", prune::PruneReportJson(r.prune_report));
  ordered_json stages = ordered_json::array();
  for (const auto& s : r.stages) {
    stages.push_back({{"stage", s.stage}, {"seconds", s.seconds},
                      {"map50", s.eval.map50}, {"map50_95", s.eval.map50_95}});
  }
  WriteFileAtomic(cfg.out / "pipeline.json",
                  ordered_json{{"stages", stages}, {"total_seconds", r.total_seconds}}.dump(2) + "\n");
  WriteFileAtomic(cfg.out / "run_config.json", cli::RunConfigJson(cfg));
  std::printf("total %.1f s\n", r.total_seconds);
  return 0;
}

int Main(int argc, char** argv) {
  ConfigureThreadsFromEnv();
  CLI::App app{"slimkit: channel pruning and desk-scale detection toolkit"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "run config JSON")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "global seed");
    sub->add_option("--out", o.out, "output directory");
  };
  auto* gen = app.add_subcommand("gen-data", "generate the synthetic dataset");
  common(gen);
  auto* train = app.add_subcommand("train", "train the toy detector from scratch");
  common(train);
  train->add_option("--data", o.data, "dataset directory");
  train->add_option("--model", o.model, "start from this graph instead of a fresh one");
  train->add_option("--epochs", o.epochs, "epoch count");
  auto* sparse = app.add_subcommand("sparse-train", "train with the L1 penalty on BN gammas");
  common(sparse);
  sparse->add_option("--data", o.data, "dataset directory");
  sparse->add_option("--model", o.model, "input graph");
  sparse->add_option("--lambda", o.lambda, "sparsity penalty weight");
  sparse->add_option("--epochs", o.epochs, "epoch count");
  auto* prune_cmd = app.add_subcommand("prune", "prune channels by BN gamma");
  common(prune_cmd);
  prune_cmd->add_option("--model", o.model, "input graph");
  prune_cmd->add_option("--rate", o.rates, "pruning rate; repeat for a sweep")
      ->check(CLI::Range(0.0, 1.0));
  auto* ft = app.add_subcommand("finetune", "fine-tune a pruned graph");
  common(ft);
  ft->add_option("--data", o.data, "dataset directory");
  ft->add_option("--model", o.model, "input graph");
  ft->add_option("--epochs", o.epochs, "epoch count");
  ft->add_option("--lambda", o.lambda, "must be 0");
  auto* eval = app.add_subcommand("eval", "evaluate a graph on a dataset split");
  common(eval);
  eval->add_option("--data", o.data, "dataset directory");
  eval->add_option("--model", o.model, "input graph");
  eval->add_option("--split", o.split, "val or train");
  auto* cost = app.add_subcommand("report-cost", "parameter and FLOP counts");
  common(cost);
  cost->add_option("--model", o.model, "input graph");
  cost->add_option("--input", o.input, "C H W override")->expected(3);
  auto* hmi_cmd = app.add_subcommand("hmi-run", "replay a gesture stream through the controller");
  common(hmi_cmd);
  hmi_cmd->add_option("--events", o.events, "JSONL event stream");
  hmi_cmd->add_option("--script", o.script, "trial script JSON");
  hmi_cmd->add_option("--adapter", o.adapter, "mock or command");
  hmi_cmd->add_option("--latency-ms", o.latency_ms, "mock adapter latency");
  hmi_cmd->add_flag("--replay", o.replay, "use the built-in scripted trial session");
  auto* validate = app.add_subcommand("graph-validate", "parse, validate and shape-check a graph");
  common(validate);
  validate->add_option("--model", o.model, "graph JSON");
  auto* pipe = app.add_subcommand("pipeline", "gen-data, train, sparse-train, prune, finetune");
  common(pipe);
  pipe->add_option("--epochs", o.epochs, "baseline epoch count");
  pipe->add_option("--lambda", o.lambda, "sparsity penalty weight");
  pipe->add_option("--rate", o.rates, "pruning rate")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    if (*gen) return GenData(o);
    if (*train) return TrainStage(o, "train");
    if (*sparse) return TrainStage(o, "sparse-train");
    if (*ft) return TrainStage(o, "finetune");
    if (*prune_cmd) return PruneCmd(o);
    if (*eval) return EvalCmd(o);
    if (*cost) return ReportCost(o);
    if (*hmi_cmd) return HmiRun(o);
    if (*validate) return GraphValidate(o);
    if (*pipe) return PipelineCmd(o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace
}  // namespace slimkit

int main(int argc, char** argv) { return slimkit::Main(argc, argv); }
