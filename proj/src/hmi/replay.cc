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


#include "slimkit/hmi/replay.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "slimkit/util/errors.h"
#include "slimkit/util/runtime_env.h"

namespace slimkit::hmi {
namespace {

// Never bound by the defaults; separates trials so discrete actions see a
// fresh rising edge.
constexpr const char* kNeutralLabel = "Palm";

}  // namespace

std::map<PlayerAction, int> ReferenceMisses() {
  return {{PlayerAction::kPlay, 0},      {PlayerAction::kPause, 0},
          {PlayerAction::kVolumeUp, 1},  {PlayerAction::kVolumeDown, 1},
          {PlayerAction::kNextTrack, 2}, {PlayerAction::kPrevTrack, 2}};
}

ScriptedSession BuildScriptedSession(const Bindings& bindings, const ReplaySpec& spec) {
  bindings.validate();
  if (spec.trials_per_action < 1) throw ConfigError("trials_per_action must be >= 1");
  if (spec.frame_ms < 1 || spec.frames_per_trial < 1 ||
      spec.frame_ms * (spec.frames_per_trial - 1) >= spec.window_ms) {
    throw ConfigError("trial frames must fit inside the window");
  }
  if (bindings.by_label.count(kNeutralLabel)) {
    throw ConfigError(std::string("label '") + kNeutralLabel + "' is reserved as neutral");
  }
  ScriptedSession out;
  std::mt19937_64 rng(ChildSeed(spec.seed, "replay"));
  std::int64_t t = 0;
  const double shown = std::min(1.0, bindings.confidence_gate + 0.4);
  const double hidden = bindings.confidence_gate * 0.5;
  for (PlayerAction a : AllActions()) {
    const std::string label = bindings.LabelFor(a);
    if (label.empty()) continue;
    const auto it = spec.misses.find(a);
    const int misses = it == spec.misses.end() ? 0 : it->second;
    if (misses < 0 || misses > spec.trials_per_action) {
      throw ConfigError("miss count for " + std::string(ActionName(a)) + " is out of range");
    }
    std::vector<int> order(spec.trials_per_action);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> miss(spec.trials_per_action, false);
    for (int k = 0; k < misses; ++k) miss[order[k]] = true;
    for (int i = 0; i < spec.trials_per_action; ++i) {
      out.script.push_back({a, t, t + spec.window_ms - 1});
      for (int f = 0; f < spec.frames_per_trial; ++f) {
        out.stream.push_back({t + f * spec.frame_ms, label, miss[i] ? hidden : shown});
      }
      t += spec.window_ms;
      out.stream.push_back({t, kNeutralLabel, shown});
      t += spec.gap_ms;
    }
  }
  return out;
}

}  // namespace slimkit::hmi
