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


// Gesture-to-media-player controller: bindings, the debouncing state
// machine, player adapters and session reports.

#ifndef SLIMKIT_HMI_CONTROLLER_H_
#define SLIMKIT_HMI_CONTROLLER_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slimkit::hmi {

enum class PlayerAction { kPlay, kPause, kNextTrack, kPrevTrack, kVolumeUp, kVolumeDown, kNoOp };
enum class ActionKind { kDiscrete, kContinuous };

// "Play", "Pause", "NextTrack", "PrevTrack", "VolumeUp", "VolumeDown", "NoOp".
std::string_view ActionName(PlayerAction a);
PlayerAction ParseAction(std::string_view name);  // throws ParseError
const std::vector<PlayerAction>& AllActions();  // NoOp excluded

struct GestureEvent {
  std::int64_t t_ms = 0;
  std::string class_label;
  double confidence = 1.0;
};

struct ActionBinding {
  PlayerAction action = PlayerAction::kNoOp;
  ActionKind kind = ActionKind::kDiscrete;
  std::int64_t cooldown_ms = 500;  // continuous actions only
};

struct Bindings {
  std::map<std::string, ActionBinding> by_label;
  double confidence_gate = 0.5;

  // Unbound labels map to NoOp.
  ActionBinding Lookup(const std::string& label) const;
  // First label bound to `a`, or "" when none.
  std::string LabelFor(PlayerAction a) const;
  void validate() const;  // throws ConfigError
};

// Ok/Fist discrete Play/Pause; Two/Three/L/Hang continuous
// NextTrack/PrevTrack/VolumeUp/VolumeDown.
Bindings DefaultBindings();

struct ControllerState {
  std::optional<std::int64_t> last_t_ms;
  // Label of the last event that passed the confidence gate.
  std::optional<std::string> last_label;
  std::map<PlayerAction, std::int64_t> last_fire_ms;
};

// Throws StreamError when the timestamp goes backwards.
std::optional<PlayerAction> Step(ControllerState& state, const GestureEvent& event,
                                 const Bindings& bindings);

struct AdapterResult {
  bool ok = true;
  std::string error;
};

class PlayerAdapter {
 public:
  virtual ~PlayerAdapter() = default;
  virtual AdapterResult Execute(PlayerAction action) = 0;
};

// Records actions in memory; optionally blocks for a fixed latency or fails
// on chosen actions.
class MockAdapter : public PlayerAdapter {
 public:
  explicit MockAdapter(std::chrono::microseconds latency = {}) : latency_(latency) {}
  AdapterResult Execute(PlayerAction action) override;
  void FailOn(PlayerAction a) { failing_.push_back(a); }
  const std::vector<PlayerAction>& recorded() const { return recorded_; }
  std::vector<std::string> recorded_names() const;

 private:
  std::chrono::microseconds latency_;
  std::vector<PlayerAction> recorded_;
  std::vector<PlayerAction> failing_;
};

// Runs one external command per action and waits for it. Templates are
// split on whitespace into argv (no shell); "{action}" is replaced by the
// action name. A missing template, spawn failure or non-zero exit fails.
class CommandAdapter : public PlayerAdapter {
 public:
  explicit CommandAdapter(std::map<PlayerAction, std::string> templates)
      : templates_(std::move(templates)) {}
  AdapterResult Execute(PlayerAction action) override;

 private:
  std::map<PlayerAction, std::string> templates_;
};

struct Trial {
  PlayerAction expected = PlayerAction::kNoOp;
  std::int64_t window_start_ms = 0;
  std::int64_t window_end_ms = 0;  // inclusive
};

struct ActionRow {
  PlayerAction action = PlayerAction::kNoOp;
  std::string label;  // bound gesture, "" when unbound
  int fired = 0;      // adapter calls
  int failures = 0;   // adapter calls that failed
  int hits = 0;
  int misses = 0;
  std::optional<double> detection_rate_percent;  // set when trials exist
  std::optional<double> mean_response_ms;
  std::optional<double> p50_response_ms;
  std::optional<double> p95_response_ms;
};

struct FiredAction {
  std::int64_t t_ms = 0;
  PlayerAction action = PlayerAction::kNoOp;
  bool ok = true;
  double response_ms = 0.0;
};

struct SessionReport {
  std::vector<ActionRow> rows;  // one per bound action, AllActions() order
  std::size_t event_count = 0;
  std::vector<FiredAction> fired;
  std::vector<std::string> errors;
};

// Monotonic milliseconds; replaceable in tests.
using ClockFn = std::function<double()>;
double SteadyNowMs();

// Feeds every event through Step, sends fired actions to the adapter and
// times each call from ingest to return. With a script, a trial is a hit iff
// its expected action fired successfully at an event time inside the window.
SessionReport RunSession(const std::vector<GestureEvent>& stream, const Bindings& bindings,
                         PlayerAdapter& adapter, const std::vector<Trial>* script = nullptr,
                         const ClockFn& clock = SteadyNowMs);

// {"t_ms": int, "class": str, "conf": float} per line; blank lines skipped.
std::vector<GestureEvent> ParseEventStream(std::string_view jsonl);
std::string FormatEventStream(const std::vector<GestureEvent>& events);

// {"confidence_gate": x, "bindings": [{"class", "action", "kind",
// "cooldown_ms"}], "commands": {"Play": "playerctl play", ...}}.
// Missing "bindings" keeps the defaults.
struct HmiConfig {
  Bindings bindings = DefaultBindings();
  std::map<PlayerAction, std::string> commands;
};
HmiConfig ParseHmiConfig(std::string_view json_text);

// [{"expected_action", "window_start_ms", "window_end_ms"}, ...]
std::vector<Trial> ParseTrialScript(std::string_view json_text);

std::string SessionReportJson(const SessionReport& report);
// Action | Gesture | Trials | Hits | Misses | Detection rate (%) | Avg response (ms)
std::string SessionReportTable(const SessionReport& report);

}  // namespace slimkit::hmi

#endif  // SLIMKIT_HMI_CONTROLLER_H_
