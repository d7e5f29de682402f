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


// Writes the yolov5s-like topology fixture (structure only, no weights).
// Usage: make_fixture <out.json>

#include <iostream>
#include <string>

#include "slimkit/graph/builder.h"
#include "slimkit/graph/graph_io.h"

namespace {

using slimkit::graph::GraphBuilder;
using slimkit::graph::NodeKind;

std::string Bottleneck(GraphBuilder& b, const std::string& p,
                       const std::string& x, int c, bool shortcut) {
  std::string y = b.ConvBnAct(p + ".cv1", x, c, 1);
  y = b.ConvBnAct(p + ".cv2", y, c, 3);
  return shortcut ? b.Add(p + ".add", {x, y}) : y;
}

std::string C3(GraphBuilder& b, const std::string& p, const std::string& x,
               int c2, int n, bool shortcut) {
  const int hidden = c2 / 2;
  std::string m = b.ConvBnAct(p + ".cv1", x, hidden, 1);
  for (int i = 0; i < n; ++i) {
    m = Bottleneck(b, p + ".m" + std::to_string(i), m, hidden, shortcut);
  }
  const std::string side = b.ConvBnAct(p + ".cv2", x, hidden, 1);
  const std::string cat = b.Concat(p + ".cat", {m, side});
  return b.ConvBnAct(p + ".cv3", cat, c2, 1);
}

std::string Sppf(GraphBuilder& b, const std::string& p, const std::string& x,
                 int c2) {
  const std::string a = b.ConvBnAct(p + ".cv1", x, b.channels(x) / 2, 1);
  const slimkit::graph::PoolAttrs pool{5, 1, 2};
  const std::string y1 = b.MaxPool(p + ".pool1", a, pool);
  const std::string y2 = b.MaxPool(p + ".pool2", y1, pool);
  const std::string y3 = b.MaxPool(p + ".pool3", y2, pool);
  const std::string cat = b.Concat(p + ".cat", {a, y1, y2, y3});
  return b.ConvBnAct(p + ".cv2", cat, c2, 1);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixture <out.json>\n";
    return 1;
  }
  constexpr int kClasses = 13;
  constexpr int kAnchors = 3;
  GraphBuilder b("yolov5s_like", {3, 480, 480});

  // Backbone.
  std::string x = b.ConvBnAct("b0", "input", 32, 6, 2, 2);  // focus-style stem
  x = b.ConvBnAct("b1", x, 64, 3, 2);
  x = C3(b, "b2", x, 64, 1, true);
  x = b.ConvBnAct("b3", x, 128, 3, 2);
  const std::string p3 = C3(b, "b4", x, 128, 2, true);
  x = b.ConvBnAct("b5", p3, 256, 3, 2);
  const std::string p4 = C3(b, "b6", x, 256, 3, true);
  x = b.ConvBnAct("b7", p4, 512, 3, 2);
  x = C3(b, "b8", x, 512, 1, true);
  x = Sppf(b, "b9", x, 512);

  // FPN top-down.
  const std::string h10 = b.ConvBnAct("h10", x, 256, 1);
  x = b.Upsample("h11", h10);
  x = b.Concat("h12", {x, p4});
  x = C3(b, "h13", x, 256, 1, false);
  const std::string h14 = b.ConvBnAct("h14", x, 128, 1);
  x = b.Upsample("h15", h14);
  x = b.Concat("h16", {x, p3});
  const std::string out_p3 = C3(b, "h17", x, 128, 1, false);

  // PAN bottom-up.
  x = b.ConvBnAct("h18", out_p3, 128, 3, 2);
  x = b.Concat("h19", {x, h14});
  const std::string out_p4 = C3(b, "h20", x, 256, 1, false);
  x = b.ConvBnAct("h21", out_p4, 256, 3, 2);
  x = b.Concat("h22", {x, h10});
  const std::string out_p5 = C3(b, "h23", x, 512, 1, false);

  // Three detection layers.
  int level = 3;
  for (const std::string& feat : {out_p3, out_p4, out_p5}) {
    const std::string tag = "detect.p" + std::to_string(level++);
    b.Conv(tag + ".conv", feat, kAnchors * (5 + kClasses), 1, 1, 0, true);
    b.Output(b.DetectHead(tag, tag + ".conv", kClasses, kAnchors));
  }

  std::vector<std::string> names;
  for (int c = 0; c < kClasses; ++c) names.push_back("class_" + std::to_string(c));
  b.SetClasses(names);
  b.SetNotes(
      "Structural small-variant detector (width multiple 0.5, depth multiple "
      "0.33). Stage widths 32/64/128/256/512; C3 repeats 1/2/3/1 in the "
      "backbone with residual shortcuts, 1 in the neck without. SPPF uses "
      "three chained 5x5 stride-1 pad-2 max pools. Heads at strides 8/16/32 "
      "emit 3 anchors x (5 + 13 classes). Weights are not shipped; "
      "initialize them from a seed before running. Residual coupling groups "
      "by hand count: b2 (2 batch norms), b4 (3), b6 (4), b8 (2).");
  slimkit::graph::SaveGraph(b.Build(), argv[1]);
  return 0;
}
