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


// Scripted trial sessions: per action, a run of trial windows in which the
// bound gesture is shown confidently, or shown below the confidence gate
// when the trial is an injected miss.

#ifndef SLIMKIT_HMI_REPLAY_H_
#define SLIMKIT_HMI_REPLAY_H_

#include <cstdint>
#include <map>
#include <vector>

#include "slimkit/hmi/controller.h"

namespace slimkit::hmi {

struct ReplaySpec {
  int trials_per_action = 5;
  std::map<PlayerAction, int> misses;  // absent actions miss nothing
  std::int64_t window_ms = 1000;
  std::int64_t gap_ms = 200;     // neutral frames between windows
  std::int64_t frame_ms = 33;
  int frames_per_trial = 10;
  std::uint64_t seed = 0;        // picks which trials miss
};

struct ScriptedSession {
  std::vector<GestureEvent> stream;
  std::vector<Trial> script;
};

// Misses per action as in the reference media-player sessions: Play and
// Pause 0, VolumeUp and VolumeDown 1, NextTrack and PrevTrack 2.
std::map<PlayerAction, int> ReferenceMisses();

// Every bound action in AllActions() order. Throws ConfigError when a miss
// count exceeds the trial count or an action has no bound gesture.
ScriptedSession BuildScriptedSession(const Bindings& bindings, const ReplaySpec& spec);

}  // namespace slimkit::hmi

#endif  // SLIMKIT_HMI_REPLAY_H_
