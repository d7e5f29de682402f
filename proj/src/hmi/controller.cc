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


#include "slimkit/hmi/controller.h"

#include <fcntl.h>
#include <spawn.h>
#include <unistd.h>
#include <sys/wait.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "slimkit/util/errors.h"

extern char** environ;

namespace slimkit::hmi {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::pair<PlayerAction, std::string_view> kNames[] = {
    {PlayerAction::kPlay, "Play"},
    {PlayerAction::kPause, "Pause"},
    {PlayerAction::kNextTrack, "NextTrack"},
    {PlayerAction::kPrevTrack, "PrevTrack"},
    {PlayerAction::kVolumeUp, "VolumeUp"},
    {PlayerAction::kVolumeDown, "VolumeDown"},
    {PlayerAction::kNoOp, "NoOp"},
};

std::vector<std::string> SplitArgs(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

std::string Substitute(std::string s, std::string_view name) {
  static constexpr std::string_view kKey = "{action}";
  for (std::size_t p = s.find(kKey); p != std::string::npos;
       p = s.find(kKey, p + name.size())) {
    s.replace(p, kKey.size(), name);
  }
  return s;
}

// Nearest-rank percentile of a sorted, non-empty list.
double Percentile(const std::vector<double>& sorted, double p) {
  const auto rank = static_cast<std::size_t>(std::ceil(p * sorted.size()));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

template <typename T>
T Field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(where + ": \"" + key + "\" has the wrong type");
  }
}

json ParseJson(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

}  // namespace

std::string_view ActionName(PlayerAction a) {
  for (const auto& [act, name] : kNames) {
    if (act == a) return name;
  }
  return "NoOp";
}

PlayerAction ParseAction(std::string_view name) {
  for (const auto& [act, n] : kNames) {
    if (n == name) return act;
  }
  throw ParseError("unknown player action '" + std::string(name) + "'");
}

const std::vector<PlayerAction>& AllActions() {
  static const std::vector<PlayerAction> all = {
      PlayerAction::kPlay,     PlayerAction::kPause,    PlayerAction::kNextTrack,
      PlayerAction::kPrevTrack, PlayerAction::kVolumeUp, PlayerAction::kVolumeDown};
  return all;
}

ActionBinding Bindings::Lookup(const std::string& label) const {
  const auto it = by_label.find(label);
  return it == by_label.end() ? ActionBinding{} : it->second;
}

std::string Bindings::LabelFor(PlayerAction a) const {
  for (const auto& [label, b] : by_label) {
    if (b.action == a) return label;
  }
  return "";
}

void Bindings::validate() const {
  if (!(confidence_gate >= 0.0 && confidence_gate <= 1.0)) {
    throw ConfigError("confidence_gate must lie in [0, 1]");
  }
  for (const auto& [label, b] : by_label) {
    if (b.kind == ActionKind::kContinuous && b.cooldown_ms <= 0) {
      throw ConfigError("binding '" + label + "': cooldown_ms must be > 0");
    }
  }
}

Bindings DefaultBindings() {
  Bindings b;
  b.by_label = {
      {"Ok", {PlayerAction::kPlay, ActionKind::kDiscrete, 500}},
      {"Fist", {PlayerAction::kPause, ActionKind::kDiscrete, 500}},
      {"Two", {PlayerAction::kNextTrack, ActionKind::kContinuous, 500}},
      {"Three", {PlayerAction::kPrevTrack, ActionKind::kContinuous, 500}},
      {"L", {PlayerAction::kVolumeUp, ActionKind::kContinuous, 500}},
      {"Hang", {PlayerAction::kVolumeDown, ActionKind::kContinuous, 500}},
  };
  return b;
}

std::optional<PlayerAction> Step(ControllerState& state, const GestureEvent& event,
                                 const Bindings& bindings) {
  if (state.last_t_ms && event.t_ms < *state.last_t_ms) {
    throw StreamError("event at t=" + std::to_string(event.t_ms) +
                      " ms precedes the previous event at t=" +
                      std::to_string(*state.last_t_ms) + " ms");
  }
  state.last_t_ms = event.t_ms;
  if (!(event.confidence >= bindings.confidence_gate)) return std::nullopt;
  const bool same_label = state.last_label == event.class_label;
  state.last_label = event.class_label;
  const ActionBinding b = bindings.Lookup(event.class_label);
  if (b.action == PlayerAction::kNoOp) return std::nullopt;
  if (b.kind == ActionKind::kDiscrete) {
    if (same_label) return std::nullopt;
  } else {
    const auto it = state.last_fire_ms.find(b.action);
    if (it != state.last_fire_ms.end() && event.t_ms - it->second < b.cooldown_ms) {
      return std::nullopt;
    }
  }
  state.last_fire_ms[b.action] = event.t_ms;
  return b.action;
}

AdapterResult MockAdapter::Execute(PlayerAction action) {
  if (latency_.count() > 0) {
    std::this_thread::sleep_until(std::chrono::steady_clock::now() + latency_);
  }
  recorded_.push_back(action);
  if (std::find(failing_.begin(), failing_.end(), action) != failing_.end()) {
    return {false, "mock failure for " + std::string(ActionName(action))};
  }
  return {};
}

std::vector<std::string> MockAdapter::recorded_names() const {
  std::vector<std::string> out;
  for (PlayerAction a : recorded_) out.emplace_back(ActionName(a));
  return out;
}

AdapterResult CommandAdapter::Execute(PlayerAction action) {
  const auto it = templates_.find(action);
  if (it == templates_.end()) {
    return {false, "no command configured for " + std::string(ActionName(action))};
  }
  const std::vector<std::string> args = SplitArgs(Substitute(it->second, ActionName(action)));
  if (args.empty()) return {false, "empty command for " + std::string(ActionName(action))};
  std::vector<char*> argv;
  for (const std::string& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_addopen(&fa, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  if (rc != 0) return {false, "cannot run '" + args[0] + "': " + std::strerror(rc)};
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) return {false, "waitpid failed: " + std::string(std::strerror(errno))};
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 0) return {};
  if (WIFEXITED(status)) {
    // posix_spawnp may report a failed exec as exit status 127.
    return {false, "'" + args[0] + "' exited with status " +
                       std::to_string(WEXITSTATUS(status))};
  }
  return {false, "'" + args[0] + "' terminated by a signal"};
}

double SteadyNowMs() {
  using namespace std::chrono;
  return duration<double, std::milli>(steady_clock::now().time_since_epoch()).count();
}

SessionReport RunSession(const std::vector<GestureEvent>& stream, const Bindings& bindings,
                         PlayerAdapter& adapter, const std::vector<Trial>* script,
                         const ClockFn& clock) {
  bindings.validate();
  SessionReport report;
  report.event_count = stream.size();
  ControllerState state;
  for (const GestureEvent& e : stream) {
    const double ingest = clock();
    const std::optional<PlayerAction> action = Step(state, e, bindings);
    if (!action) continue;
    AdapterResult r;
    try {
      r = adapter.Execute(*action);
    } catch (const std::exception& ex) {
      r = {false, ex.what()};
    }
    const double done = clock();
    report.fired.push_back({e.t_ms, *action, r.ok, done - ingest});
    if (!r.ok) {
      report.errors.push_back("t=" + std::to_string(e.t_ms) + " ms " +
                              std::string(ActionName(*action)) + ": " + r.error);
    }
  }

  for (PlayerAction a : AllActions()) {
    ActionRow row;
    row.action = a;
    row.label = bindings.LabelFor(a);
    std::vector<double> times;
    for (const FiredAction& f : report.fired) {
      if (f.action != a) continue;
      ++row.fired;
      if (!f.ok) ++row.failures;
      times.push_back(f.response_ms);
    }
    int trials = 0;
    if (script) {
      for (const Trial& t : *script) {
        if (t.expected != a) continue;
        ++trials;
        const bool hit = std::any_of(report.fired.begin(), report.fired.end(),
                                     [&](const FiredAction& f) {
                                       return f.ok && f.action == a &&
                                              f.t_ms >= t.window_start_ms &&
                                              f.t_ms <= t.window_end_ms;
                                     });
        hit ? ++row.hits : ++row.misses;
      }
    }
    if (row.label.empty() && row.fired == 0 && trials == 0) continue;
    if (trials > 0) row.detection_rate_percent = 100.0 * row.hits / trials;
    if (!times.empty()) {
      double sum = 0.0;
      for (double t : times) sum += t;
      row.mean_response_ms = sum / static_cast<double>(times.size());
      std::sort(times.begin(), times.end());
      row.p50_response_ms = Percentile(times, 0.50);
      row.p95_response_ms = Percentile(times, 0.95);
    }
    report.rows.push_back(row);
  }
  return report;
}

std::vector<GestureEvent> ParseEventStream(std::string_view jsonl) {
  std::vector<GestureEvent> out;
  std::istringstream is{std::string(jsonl)};
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "event stream line " + std::to_string(line_no);
    const json j = ParseJson(line, where);
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    GestureEvent e;
    e.t_ms = Field<std::int64_t>(j, "t_ms", where);
    e.class_label = Field<std::string>(j, "class", where);
    e.confidence = Field<double>(j, "conf", where);
    if (!(e.confidence >= 0.0 && e.confidence <= 1.0)) {
      throw ParseError(where + ": conf must lie in [0, 1]");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string FormatEventStream(const std::vector<GestureEvent>& events) {
  std::string out;
  for (const GestureEvent& e : events) {
    ordered_json j{{"t_ms", e.t_ms}, {"class", e.class_label}, {"conf", e.confidence}};
    out += j.dump() + "\n";
  }
  return out;
}

HmiConfig ParseHmiConfig(std::string_view json_text) {
  const json j = ParseJson(json_text, "hmi config");
  if (!j.is_object()) throw ParseError("hmi config: expected an object");
  HmiConfig cfg;
  if (j.contains("confidence_gate")) {
    cfg.bindings.confidence_gate = Field<double>(j, "confidence_gate", "hmi config");
  }
  if (j.contains("bindings")) {
    cfg.bindings.by_label.clear();
    const json& list = j.at("bindings");
    if (!list.is_array()) throw ParseError("hmi config: \"bindings\" must be a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "hmi config binding " + std::to_string(i);
      const json& b = list[i];
      const auto label = Field<std::string>(b, "class", where);
      ActionBinding ab;
      ab.action = ParseAction(Field<std::string>(b, "action", where));
      const auto kind = Field<std::string>(b, "kind", where);
      if (kind == "discrete") {
        ab.kind = ActionKind::kDiscrete;
      } else if (kind == "continuous") {
        ab.kind = ActionKind::kContinuous;
      } else {
        throw ParseError(where + ": kind must be \"discrete\" or \"continuous\"");
      }
      if (b.contains("cooldown_ms")) ab.cooldown_ms = Field<std::int64_t>(b, "cooldown_ms", where);
      if (!cfg.bindings.by_label.emplace(label, ab).second) {
        throw ConfigError(where + ": class '" + label + "' is bound twice");
      }
    }
  }
  if (j.contains("commands")) {
    const json& cmds = j.at("commands");
    if (!cmds.is_object()) throw ParseError("hmi config: \"commands\" must be an object");
    for (const auto& [name, tmpl] : cmds.items()) {
      if (!tmpl.is_string()) throw ParseError("hmi config: command for " + name + " must be a string");
      cfg.commands[ParseAction(name)] = tmpl.get<std::string>();
    }
  }
  cfg.bindings.validate();
  return cfg;
}

std::vector<Trial> ParseTrialScript(std::string_view json_text) {
  const json j = ParseJson(json_text, "trial script");
  if (!j.is_array()) throw ParseError("trial script: expected a list");
  std::vector<Trial> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "trial " + std::to_string(i);
    Trial t;
    t.expected = ParseAction(Field<std::string>(j[i], "expected_action", where));
    t.window_start_ms = Field<std::int64_t>(j[i], "window_start_ms", where);
    t.window_end_ms = Field<std::int64_t>(j[i], "window_end_ms", where);
    if (t.window_end_ms < t.window_start_ms) throw ParseError(where + ": window ends before it starts");
    out.push_back(t);
  }
  return out;
}

std::string SessionReportJson(const SessionReport& report) {
  auto opt = [](const std::optional<double>& v) -> ordered_json {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  ordered_json rows = ordered_json::array();
  for (const ActionRow& r : report.rows) {
    rows.push_back({{"action", ActionName(r.action)},
                    {"gesture", r.label},
                    {"fired", r.fired},
                    {"failures", r.failures},
                    {"hits", r.hits},
                    {"misses", r.misses},
                    {"detection_rate_percent", opt(r.detection_rate_percent)},
                    {"mean_response_ms", opt(r.mean_response_ms)},
                    {"p50_response_ms", opt(r.p50_response_ms)},
                    {"p95_response_ms", opt(r.p95_response_ms)}});
  }
  ordered_json fired = ordered_json::array();
  for (const FiredAction& f : report.fired) {
    fired.push_back({{"t_ms", f.t_ms}, {"action", ActionName(f.action)},
                     {"ok", f.ok}, {"response_ms", f.response_ms}});
  }
  ordered_json j{{"event_count", report.event_count},
                 {"actions", rows},
                 {"fired", fired},
                 {"errors", report.errors}};
  return j.dump(2) + "\n";
}

std::string SessionReportTable(const SessionReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(11) << "Action" << std::setw(9) << "Gesture"
     << std::right << std::setw(7) << "Trials" << std::setw(6) << "Hits"
     << std::setw(8) << "Misses" << std::setw(20) << "Detection rate (%)"
     << std::setw(20) << "Avg response (ms)" << "\n";
  os << std::fixed;
  for (const ActionRow& r : report.rows) {
    os << std::left << std::setw(11) << ActionName(r.action) << std::setw(9)
       << (r.label.empty() ? "-" : r.label) << std::right << std::setw(7)
       << r.hits + r.misses << std::setw(6) << r.hits << std::setw(8) << r.misses;
    if (r.detection_rate_percent) {
      os << std::setw(20) << std::setprecision(2) << *r.detection_rate_percent;
    } else {
      os << std::setw(20) << "-";
    }
    if (r.mean_response_ms) {
      os << std::setw(20) << std::setprecision(3) << *r.mean_response_ms;
    } else {
      os << std::setw(20) << "-";
    }
    os << "\n";
  }
  os << "events: " << report.event_count << ", actions fired: " << report.fired.size()
     << ", adapter failures: " << report.errors.size() << "\n";
  return os.str();
}

}  // namespace slimkit::hmi
