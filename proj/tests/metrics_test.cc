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

#include <cmath>
#include <functional>
#include <random>

#include "metrics_reference.h"
#include "slimkit/metrics/detection.h"
#include "slimkit/util/errors.h"

namespace slimkit::metrics {
namespace {

BoxDet Det(int img, int cls, Box b, double conf = 1.0) {
  return {img, cls, b, conf};
}

TEST(IouTest, Examples) {
  const Box a{0, 0, 2, 2};
  EXPECT_EQ(Iou(a, a), 1.0);
  EXPECT_EQ(Iou(a, {5, 5, 6, 6}), 0.0);
  EXPECT_NEAR(Iou(a, {1, 0, 3, 2}), 2.0 / 6.0, 1e-15);
  EXPECT_EQ(Iou(a, {1, 1, 1, 3}), 0.0);  // zero-area
  EXPECT_EQ(Iou(a, {2, 0, 4, 2}), 0.0);  // touching edge
}

TEST(MatchTest, SingleExactHit) {
  std::vector<BoxDet> d{Det(0, 0, {0, 0, 2, 2}, 0.9)};
  std::vector<BoxDet> g{Det(0, 0, {0, 0, 2, 2})};
  const MatchResult m = Match(d, g, 0.5);
  EXPECT_EQ(m.counts.tp, 1);
  EXPECT_EQ(m.counts.fp, 0);
  EXPECT_EQ(m.counts.fn, 0);
}

TEST(MatchTest, OneToOne) {
  std::vector<BoxDet> d{Det(0, 0, {0, 0, 2, 2}, 0.6), Det(0, 0, {0, 0, 2, 2}, 0.9)};
  std::vector<BoxDet> g{Det(0, 0, {0, 0, 2, 2})};
  const MatchResult m = Match(d, g, 0.5);
  EXPECT_EQ(m.counts.tp, 1);
  EXPECT_EQ(m.counts.fp, 1);
  EXPECT_EQ(m.is_tp, (std::vector<bool>{false, true}));
}

TEST(MatchTest, ClassAndImageMustAgree) {
  std::vector<BoxDet> d{Det(0, 1, {0, 0, 2, 2}), Det(1, 0, {0, 0, 2, 2})};
  std::vector<BoxDet> g{Det(0, 0, {0, 0, 2, 2})};
  const MatchResult m = Match(d, g, 0.5);
  EXPECT_EQ(m.counts.tp, 0);
  EXPECT_EQ(m.counts.fp, 2);
  EXPECT_EQ(m.counts.fn, 1);
}

// Enumerates every partial one-to-one assignment and keeps the one that is
// consistent with processing detections in confidence order.
MatchCounts BruteForceMatch(const std::vector<BoxDet>& d,
                            const std::vector<BoxDet>& g, double thr) {
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return d[a].confidence > d[b].confidence;
  });
  std::vector<int> assign(d.size(), -1);
  std::optional<MatchCounts> found;
  int consistent = 0;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == d.size()) {
      std::vector<bool> used(g.size(), false);
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t di = order[pos];
        int best = -1;
        double bv = -1;
        for (std::size_t gi = 0; gi < g.size(); ++gi) {
          if (used[gi] || g[gi].class_id != d[di].class_id ||
              g[gi].image_id != d[di].image_id) continue;
          const double v = testing::NaiveIou(d[di].box, g[gi].box);
          if (v >= thr && v > bv) {
            bv = v;
            best = static_cast<int>(gi);
          }
        }
        if (assign[di] != best) return;
        if (best >= 0) used[best] = true;
      }
      ++consistent;
      MatchCounts c;
      for (int a : assign) c.tp += a >= 0;
      c.fp = static_cast<int>(d.size()) - c.tp;
      c.fn = static_cast<int>(g.size()) - c.tp;
      found = c;
      return;
    }
    for (int gi = -1; gi < static_cast<int>(g.size()); ++gi) {
      bool clash = false;
      for (std::size_t j = 0; j < k; ++j) clash |= gi >= 0 && assign[j] == gi;
      if (clash) continue;
      assign[k] = gi;
      rec(k + 1);
    }
    assign[k] = -1;
  };
  rec(0);
  EXPECT_EQ(consistent, 1);
  return *found;
}

TEST(MatchTest, AgreesWithAssignmentEnumeration) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<BoxDet> d, g;
    const int ng = 1 + static_cast<int>(rng() % 5);
    const int nd = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < ng; ++i) {
      const double x = 10 * u(rng), y = 10 * u(rng);
      g.push_back(Det(0, static_cast<int>(rng() % 2), {x, y, x + 4, y + 4}));
    }
    for (int i = 0; i < nd; ++i) {
      BoxDet base = g[rng() % g.size()];
      base.box.x1 += 2 * (u(rng) - 0.5);
      base.box.x2 += 2 * (u(rng) - 0.5);
      base.confidence = std::round(4 * u(rng)) / 4;
      d.push_back(base);
    }
    const MatchCounts want = BruteForceMatch(d, g, 0.5);
    const MatchCounts got = Match(d, g, 0.5).counts;
    EXPECT_EQ(got.tp, want.tp);
    EXPECT_EQ(got.fp, want.fp);
    EXPECT_EQ(got.fn, want.fn);
  }
}

TEST(PrfTest, Examples) {
  const Prf p = ComputePrf({5, 0, 0});
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(p.recall, 1.0);
  EXPECT_EQ(p.f_score, 1.0);
  const Prf z = ComputePrf({0, 0, 0});
  EXPECT_EQ(z.precision, 0.0);
  EXPECT_EQ(z.recall, 0.0);
  EXPECT_EQ(z.f_score, 0.0);
  const Prf t = PrfFromRates(0.9970, 0.9960);
  EXPECT_EQ(std::round(t.f_score * 10000) / 100, 99.65);
}

TEST(PrfTest, PermutationInvariant) {
  std::mt19937_64 rng(2);
  auto inst = testing::RandomInstance(rng, 3);
  const MatchCounts a = Match(inst.dets, inst.gts, 0.5).counts;
  // Reversing input order only changes tie-breaking among equal
  // confidences; make confidences distinct first.
  for (std::size_t i = 0; i < inst.dets.size(); ++i) {
    inst.dets[i].confidence = 1.0 / (2.0 + static_cast<double>(i));
  }
  const MatchCounts b = Match(inst.dets, inst.gts, 0.5).counts;
  std::reverse(inst.dets.begin(), inst.dets.end());
  const MatchCounts c = Match(inst.dets, inst.gts, 0.5).counts;
  EXPECT_EQ(b.tp, c.tp);
  EXPECT_EQ(b.fp, c.fp);
  EXPECT_EQ(a.tp + a.fp, b.tp + b.fp);
}

TEST(ApTest, PerfectAndAllFalse) {
  EXPECT_EQ(AveragePrecision({true, true}, std::vector<double>{0.9, 0.8}, 2), 1.0);
  EXPECT_EQ(AveragePrecision({false, false}, std::vector<double>{0.9, 0.8}, 2), 0.0);
  EXPECT_FALSE(AveragePrecision({}, std::vector<double>{}, 0).has_value());
  EXPECT_EQ(AveragePrecision({false}, std::vector<double>{0.5}, 0), 0.0);
  EXPECT_EQ(AveragePrecision({}, std::vector<double>{}, 3), 0.0);
}

TEST(ApTest, HandIntegratedThreeDetections) {
  // tp, fp, tp over 2 ground truths. Recall 0.5 at precision 1, then recall
  // 1.0 at precision 2/3. Points 0.00..0.50 (51 of them) read 1, points
  // 0.51..1.00 (50) read 2/3.
  const double hand = (51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0;
  const auto ap =
      AveragePrecision({true, false, true}, std::vector<double>{0.9, 0.8, 0.7}, 2);
  ASSERT_TRUE(ap.has_value());
  EXPECT_NEAR(*ap, hand, 1e-15);
  EXPECT_NEAR(hand, 0.83498349834983498, 1e-15);
}

TEST(MapTest, PerfectSingleClass) {
  std::vector<BoxDet> g{Det(0, 0, {0, 0, 10, 10}), Det(1, 0, {5, 5, 20, 20})};
  std::vector<BoxDet> d = g;
  d[0].confidence = 0.9;
  d[1].confidence = 0.8;
  const MetricsReport r = MapRange(d, g, 1);
  EXPECT_EQ(r.map50, 1.0);
  EXPECT_EQ(r.map50_95, 1.0);
  EXPECT_EQ(r.prf.f_score, 1.0);
}

TEST(MapTest, EmptyDetections) {
  std::vector<BoxDet> g{Det(0, 0, {0, 0, 10, 10})};
  const MetricsReport r = MapRange({}, g, 2);
  EXPECT_EQ(r.map50, 0.0);
  EXPECT_EQ(r.map50_95, 0.0);
  EXPECT_EQ(r.prf.precision, 0.0);
  EXPECT_EQ(r.prf.recall, 0.0);
}

TEST(MapTest, UnknownClassIsInputError) {
  std::vector<BoxDet> g{Det(0, 3, {0, 0, 10, 10})};
  EXPECT_THROW(MapRange({}, g, 3), InputError);
}

TEST(MapTest, MatchesNaiveReference) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = testing::RandomInstance(rng, 3);
    const MetricsReport r = MapRange(inst.dets, inst.gts, 3);
    const testing::NaiveMaps n = testing::NaiveMap(inst.dets, inst.gts, 3);
    EXPECT_NEAR(r.map50, n.map50, 1e-9);
    EXPECT_NEAR(r.map50_95, n.map50_95, 1e-9);
    EXPECT_LE(r.map50_95, r.map50 + 1e-12);
  }
}

TEST(MapTest, RankOnlyDependence) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = testing::RandomInstance(rng, 3);
    const MetricsReport a = MapRange(inst.dets, inst.gts, 3);
    for (auto& d : inst.dets) d.confidence = std::sqrt(d.confidence) * 0.5 + 0.1;
    MetricsOptions opt;
    opt.prf_confidence = std::sqrt(0.25) * 0.5 + 0.1;
    const MetricsReport b = MapRange(inst.dets, inst.gts, 3, opt);
    EXPECT_EQ(a.map50, b.map50);
    EXPECT_EQ(a.map50_95, b.map50_95);
    EXPECT_EQ(a.prf.f_score, b.prf.f_score);
  }
}

TEST(MapTest, FalsePositiveNeverHelpsTruePositiveNeverHurts) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = testing::RandomInstance(rng, 1);
    if (inst.gts.empty()) continue;
    const double base = MapRange(inst.dets, inst.gts, 1).map50;
    auto with_fp = inst.dets;
    with_fp.push_back(Det(0, 0, {1000, 1000, 1010, 1010}, 0.5));
    EXPECT_LE(MapRange(with_fp, inst.gts, 1).map50, base + 1e-12);
    // An exact unmatched-prone copy at top confidence on a fresh image.
    auto gts = inst.gts;
    gts.push_back(Det(99, 0, {0, 0, 10, 10}));
    const double before = MapRange(inst.dets, gts, 1).map50;
    auto with_tp = inst.dets;
    with_tp.push_back(Det(99, 0, {0, 0, 10, 10}, 2.0));
    EXPECT_GE(MapRange(with_tp, gts, 1).map50, before - 1e-12);
  }
}

TEST(LabelTest, RoundTrip) {
  std::vector<BoxDet> b{Det(3, 1, {10, 20, 30, 60}, 0.75)};
  const std::string text = FormatLabels(b, 96, 96, true);
  const auto back = ParseLabels(text, 3, 96, 96);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].class_id, 1);
  EXPECT_NEAR(back[0].box.x1, 10, 1e-12);
  EXPECT_NEAR(back[0].box.y2, 60, 1e-12);
  EXPECT_EQ(back[0].confidence, 0.75);
}

TEST(LabelTest, MalformedLineNamed) {
  try {
    ParseLabels("0 0.5 0.5 0.1 0.1\n1 0.5 x 0.1 0.1\n", 0, 96, 96);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ReportTest, JsonHasPercentages) {
  std::vector<BoxDet> g{Det(0, 0, {0, 0, 10, 10})};
  const std::string j = MetricsReportJson(MapRange(g, g, 1));
  EXPECT_NE(j.find("\"map50\": 100.0"), std::string::npos) << j;
}

}  // namespace
}  // namespace slimkit::metrics
