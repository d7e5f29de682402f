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


#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <set>

#include "slimkit/graph/analysis.h"
#include "slimkit/graph/builder.h"
#include "slimkit/graph/executor.h"
#include "slimkit/graph/graph_io.h"
#include "slimkit/util/errors.h"
#include "slimkit/util/runtime_env.h"
#include "test_util.h"

namespace slimkit::graph {
namespace {

using nn::Tensor4;
using testing::DataDir;
using testing::RandomTensor;

constexpr const char* kOneConv = R"({
  "schema": "slimkit_graph_v1",
  "name": "one_conv",
  "input_shape": [1, 4, 4],
  "classes": [],
  "nodes": [
    {"id": "c", "kind": "conv", "inputs": ["input"],
     "attrs": {"in_ch": 1, "out_ch": 2, "kh": 3, "kw": 3, "stride": 1, "pad": 1}}
  ],
  "outputs": ["c"]
})";

GraphModel Residual() {
  GraphBuilder b("residual", {3, 8, 8});
  const std::string stem = b.ConvBnAct("stem", "input", 4, 3);
  const std::string a = b.ConvBnAct("a", stem, 4, 3);
  b.Add("add", {stem, a});
  b.Conv("head", "add", 6, 1, 1, 0, true);
  b.Output(b.DetectHead("det", "head", 1, 1));
  return b.Build();
}

GraphModel Fixture() { return LoadGraph(DataDir() / "yolov5s_like.json"); }

TEST(GraphIoTest, MinimalGraphLoads) {
  GraphModel m = ParseGraph(kOneConv);
  EXPECT_EQ(m.nodes.size(), 1u);
  EXPECT_FALSE(m.nodes[0].has_params());
}

TEST(GraphIoTest, FixtureHasThreeDetectHeads) {
  GraphModel m = Fixture();
  const auto heads = std::count_if(m.nodes.begin(), m.nodes.end(), [](auto& n) {
    return n.kind == NodeKind::kDetectHead;
  });
  EXPECT_EQ(heads, 3);
  EXPECT_EQ(m.outputs.size(), 3u);
}

TEST(GraphIoTest, RoundTripIsBitwise) {
  GraphModel m = Residual();
  InitializeMissingParams(m, 11);
  m.nodes[1].bn_params().running_var[2] = 0.1 + 1e-17;
  for (ParamEncoding enc : {ParamEncoding::kBase64, ParamEncoding::kInline}) {
    const std::string text = SerializeGraph(m, enc);
    GraphModel back = ParseGraph(text);
    EXPECT_EQ(SerializeGraph(back, enc), text);
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
      if (!m.nodes[i].has_params()) continue;
      if (m.nodes[i].kind == NodeKind::kConv) {
        const auto& a = m.nodes[i].conv_params().weight;
        const auto& b = back.nodes[i].conv_params().weight;
        ASSERT_EQ(a.size(), b.size());
        EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0);
      } else {
        EXPECT_EQ(m.nodes[i].bn_params().running_var,
                  back.nodes[i].bn_params().running_var);
      }
    }
  }
}

TEST(GraphIoTest, SaveLoadThroughFile) {
  GraphModel m = Residual();
  InitializeMissingParams(m, 3);
  const auto dir = testing::TempDir("graph_io");
  SaveGraph(m, dir / "g.json");
  EXPECT_EQ(SerializeGraph(LoadGraph(dir / "g.json")), SerializeGraph(m));
  EXPECT_FALSE(std::filesystem::exists(dir / "g.json.tmp"));
}

TEST(GraphIoTest, SchemaViolationNamesNodeAndField) {
  std::string text = kOneConv;
  text.replace(text.find("\"out_ch\": 2"), 11, "\"out_ch\": \"x\"");
  try {
    ParseGraph(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'c'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("out_ch"), std::string::npos) << msg;
  }
}

TEST(GraphIoTest, WrongSchemaRejected) {
  std::string text = kOneConv;
  text.replace(text.find("slimkit_graph_v1"), 16, "other_schema_v9");
  EXPECT_THROW(ParseGraph(text), ParseError);
}

TEST(GraphModelTest, CycleIsValidationError) {
  GraphBuilder b("cyc", {2, 4, 4});
  b.Conv("c1", "input", 2, 1);
  b.Activation("a", "c1");
  b.Add("add", {"a", "c1"});
  b.Output("add");
  GraphModel m = b.Build();
  m.nodes[1].inputs = {"add"};  // a <- add <- a
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(GraphModelTest, UnknownInputRejected) {
  GraphModel m = ParseGraph(kOneConv);
  m.nodes[0].inputs = {"nope"};
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(ShapeTest, StrideTwoConvHalvesExtent) {
  GraphBuilder b("s2", {3, 480, 480});
  b.Output(b.Conv("c", "input", 16, 3, 2, 1));
  const auto dims = InferShapesById(b.Build());
  EXPECT_EQ(dims.at("c"), (Dims{16, 240, 240}));
}

TEST(ShapeTest, UpsampleDoubles) {
  GraphBuilder b("up", {7, 20, 20});
  b.Activation("a", "input");
  b.Output(b.Upsample("u", "a"));
  EXPECT_EQ(InferShapesById(b.Build()).at("u"), (Dims{7, 40, 40}));
}

TEST(ShapeTest, AddMismatchIsShapeError) {
  GraphBuilder b("bad_add", {3, 8, 8});
  b.Conv("x", "input", 4, 1);
  b.Conv("y", "x", 5, 1);
  b.Output(b.Add("add", {"x", "y"}));
  try {
    GraphModel m = b.Build();
    InferShapes(m);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("add"), std::string::npos);
  }
}

TEST(ShapeTest, ForwardMatchesInferredShapes) {
  GraphModel m = Fixture();
  InitializeMissingParams(m, 5);
  const InputShape small{3, 64, 64};
  const auto dims = InferShapes(m, small);
  std::mt19937_64 rng(1);
  auto outs = RunInference(m, RandomTensor({1, 3, 64, 64}, rng));
  for (std::size_t k = 0; k < m.outputs.size(); ++k) {
    const Dims d = dims[m.index_of(m.outputs[k])];
    EXPECT_EQ(outs[k].shape(), (nn::Shape4{1, d.c, d.h, d.w}));
  }
  EXPECT_EQ(outs[0].h(), 8);
  EXPECT_EQ(outs[2].h(), 2);
}

TEST(CostTest, ConvAndBatchNormParams) {
  GraphBuilder b("p", {3, 32, 32});
  b.Conv("c", "input", 16, 3, 1, 1, true);
  b.Output(b.BatchNorm("bn", "c"));
  const CostReport r = CountParams(b.Build());
  EXPECT_EQ(r.nodes[0].trainable_params, 448);
  EXPECT_EQ(r.nodes[1].trainable_params, 32);
  EXPECT_EQ(r.nodes[1].total_params, 64);
  EXPECT_EQ(r.trainable_params, 480);
  EXPECT_EQ(r.total_params, 512);
}

TEST(CostTest, ConvFlops) {
  {
    GraphBuilder b("one", {1, 1, 1});
    b.Output(b.Conv("c", "input", 1, 1));
    EXPECT_EQ(CountFlops(b.Build()).flops, 2);
  }
  GraphBuilder b("f", {3, 32, 32});
  b.Output(b.Conv("c", "input", 16, 3, 1, 1));
  EXPECT_EQ(CountFlops(b.Build()).flops, 884736);
}

TEST(CostTest, TotalsAreSumsAndOrderInvariant) {
  GraphModel m = Fixture();
  const CostReport r = AnalyzeCost(m);
  std::int64_t params = 0;
  std::int64_t flops = 0;
  for (const NodeCost& n : r.nodes) {
    params += n.trainable_params;
    flops += n.flops;
  }
  EXPECT_EQ(params, r.trainable_params);
  EXPECT_EQ(flops, r.flops);
  EXPECT_GT(r.model_size_bytes, 0);
  // Roughly the small variant: about 7M parameters; about 16.5 GFLOPs at
  // 640 scales to about 9 at 480.
  EXPECT_GT(r.trainable_params, 6'500'000);
  EXPECT_LT(r.trainable_params, 7'500'000);
  EXPECT_GT(r.flops, 8'000'000'000);
  EXPECT_LT(r.flops, 10'000'000'000);

  // Move the heads' convs before an unrelated neck node; topology is kept.
  GraphModel shuffled = m;
  std::reverse(shuffled.nodes.end() - 6, shuffled.nodes.end());
  shuffled.validate();
  const CostReport s = AnalyzeCost(shuffled);
  EXPECT_EQ(s.trainable_params, r.trainable_params);
  EXPECT_EQ(s.total_params, r.total_params);
  EXPECT_EQ(s.flops, r.flops);
}

TEST(CouplingTest, ChainHasNoGroups) {
  GraphBuilder b("chain", {3, 8, 8});
  b.Conv("c1", "input", 4, 3, 1, 1);
  b.BatchNorm("bn", "c1");
  b.Output(b.Conv("c2", "bn", 2, 1));
  const CouplingAnalysis a = AnalyzeCoupling(b.Build());
  EXPECT_TRUE(a.groups.empty());
}

TEST(CouplingTest, ResidualBlockIsOneGroupOfTwo) {
  const CouplingAnalysis a = AnalyzeCoupling(Residual());
  ASSERT_EQ(a.groups.size(), 1u);
  EXPECT_EQ(a.groups[0].members,
            (std::vector<std::string>{"stem.bn", "a.bn"}));
  EXPECT_EQ(a.groups[0].reason, "add");
  EXPECT_FALSE(a.groups[0].locked);
  EXPECT_TRUE(a.is_prunable("stem.bn"));
}

TEST(CouplingTest, FixtureMatchesHandCount) {
  const GraphModel m = Fixture();
  const CouplingAnalysis a = AnalyzeCoupling(m);
  ASSERT_EQ(a.groups.size(), 4u);
  std::vector<std::size_t> sizes;
  for (const auto& g : a.groups) {
    sizes.push_back(g.members.size());
    EXPECT_FALSE(g.locked);
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{2, 3, 4, 2}));
  EXPECT_EQ(a.groups[2].members.front(), "b6.cv1.bn");

  // Partition: no batch norm in two groups, all members equal width.
  std::set<std::string> seen;
  const auto dims = InferShapesById(m);
  for (const auto& g : a.groups) {
    for (const auto& id : g.members) {
      EXPECT_TRUE(seen.insert(id).second) << id;
      EXPECT_EQ(dims.at(id).c, dims.at(g.members.front()).c);
    }
  }
  // Every batch norm of the fixture feeds convs only.
  std::size_t bns = 0;
  for (const auto& n : m.nodes) bns += n.kind == NodeKind::kBatchNorm;
  EXPECT_EQ(a.prunable.size(), bns);

  // h16 concatenates the upsampled h14 path (128) with b4's output (128).
  auto it = std::find_if(a.concats.begin(), a.concats.end(),
                         [](auto& c) { return c.concat == "h16"; });
  ASSERT_NE(it, a.concats.end());
  ASSERT_EQ(it->slices.size(), 2u);
  EXPECT_EQ(it->slices[1].producer, "b4.cv3.act");
  EXPECT_EQ(it->slices[1].offset, 128);
  EXPECT_EQ(it->slices[1].channels, 128);
}

TEST(CouplingTest, BranchFromInputLocksGroup) {
  // The input may have only one consumer, so the skip starts at a conv
  // without batch norm.
  GraphBuilder b("lock", {4, 8, 8});
  b.Conv("stem", "input", 4, 1);
  b.ConvBnAct("a", "stem", 4, 3);
  b.Add("add", {"a.act", "stem"});
  b.Output(b.Conv("c", "add", 2, 1));
  const CouplingAnalysis a = AnalyzeCoupling(b.Build());
  ASSERT_EQ(a.groups.size(), 1u);
  EXPECT_TRUE(a.groups[0].locked);
  EXPECT_FALSE(a.is_prunable("a.bn"));
}

TEST(CouplingTest, HeadFeedingBatchNormIsNotPrunable) {
  const CouplingAnalysis a = AnalyzeCoupling(Residual());
  // Every batch norm here reaches the head conv, never the head itself.
  EXPECT_EQ(a.prunable.size(), 2u);
  GraphBuilder b("direct", {3, 8, 8});
  b.Conv("c", "input", 6, 1);
  b.BatchNorm("bn", "c");
  b.Output(b.DetectHead("det", "bn", 1, 1));
  EXPECT_TRUE(AnalyzeCoupling(b.Build()).prunable.empty());
}

TEST(ExecutorTest, BackwardBeforeForwardIsStateError) {
  GraphModel m = Residual();
  InitializeMissingParams(m, 1);
  GraphExecutor ex(m);
  std::vector<Tensor4> grads(1);
  EXPECT_THROW(ex.Backward(grads), StateError);
}

// End-to-end reverse mode over every op kind against finite differences.
TEST(ExecutorTest, GraphGradientsMatchFiniteDifferences) {
  GraphBuilder b("mix", {2, 8, 8});
  const std::string s = b.ConvBnAct("s", "input", 3, 3);
  const std::string p = b.MaxPool("p", s);
  const std::string r = b.ConvBnAct("r", p, 3, 3, 1, 1, NodeKind::kRelu);
  const std::string add = b.Add("add", {p, r});
  const std::string up = b.Upsample("up", add);
  const std::string cat = b.Concat("cat", {up, s});
  b.Conv("head", cat, 6, 1, 1, 0, true);
  b.Output(b.DetectHead("det", "head", 1, 1));
  GraphModel m = b.Build();
  InitializeMissingParams(m, 9);
  std::mt19937_64 rng(2);
  Tensor4 x = RandomTensor({2, 2, 8, 8}, rng);
  GraphExecutor probe(m);
  Tensor4 proj = RandomTensor(probe.Forward(x, nn::BnMode::kTrain)[0].shape(), rng);

  auto loss = [&] {
    GraphModel copy = m;
    GraphExecutor ex(copy);
    return testing::Dot(ex.Forward(x, nn::BnMode::kTrain)[0], proj);
  };
  GraphModel work = m;
  GraphExecutor ex(work);
  ex.Forward(x, nn::BnMode::kTrain);
  std::vector<Tensor4> og{proj};
  GraphGradients g = ex.Backward(og);

  for (const std::string id : {"s.conv", "r.conv", "head"}) {
    const std::size_t i = m.index_of(id);
    auto& w = m.nodes[i].conv_params().weight;
    const auto& gw = std::get<nn::ConvGrads>(g.params[i]).weight;
    for (int k = 0; k < 5; ++k) {
      const std::size_t j = rng() % w.size();
      EXPECT_LT(testing::RelativeError(gw[j], testing::CentralDifference(loss, w[j])),
                1e-4)
          << id << "[" << j << "]";
    }
  }
  for (const std::string id : {"s.bn", "r.bn"}) {
    const std::size_t i = m.index_of(id);
    auto& bn = m.nodes[i].bn_params();
    const auto& gb = std::get<nn::BatchNormGrads>(g.params[i]);
    for (int c = 0; c < 3; ++c) {
      EXPECT_LT(testing::RelativeError(gb.gamma[c],
                                       testing::CentralDifference(loss, bn.gamma[c])),
                1e-4);
      EXPECT_LT(testing::RelativeError(gb.beta[c],
                                       testing::CentralDifference(loss, bn.beta[c])),
                1e-4);
    }
  }
  for (int k = 0; k < 5; ++k) {
    const std::size_t j = rng() % x.size();
    EXPECT_LT(testing::RelativeError(g.input.data()[j],
                                     testing::CentralDifference(loss, x.values()[j])),
              1e-4);
  }
}

TEST(ExecutorTest, InferenceIsDeterministicAcrossThreadCounts) {
  GraphModel m = Fixture();
  InitializeMissingParams(m, 5);
  std::mt19937_64 rng(3);
  Tensor4 x = RandomTensor({1, 3, 64, 64}, rng);
  const int saved = MaxThreads();
  SetMaxThreads(1);
  auto a = RunInference(m, x);
  SetMaxThreads(4);
  auto b = RunInference(m, x);
  SetMaxThreads(saved);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].values(), b[k].values());
}

}  // namespace
}  // namespace slimkit::graph
