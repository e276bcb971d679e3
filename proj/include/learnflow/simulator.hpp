#pragma once

// Seeded runs over any engine adapter, trace files, replay and CSV event logs.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "learnflow/engine.hpp"
#include "learnflow/pnrd.hpp"

namespace learnflow::sim {

enum class Terminal { Deadlock, StepLimit, ScriptedEnd };
const char* to_string(Terminal t);
Terminal terminal_from_string(const std::string& s);

struct TraceStep {
  std::size_t index = 0;
  std::string transition;
  std::vector<std::pair<std::string, std::string>> binding;  // variable, value text
  std::uint64_t pre = 0;
  std::uint64_t post = 0;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct Trace {
  std::string model;  // hex model hash
  std::optional<std::uint64_t> seed;
  std::vector<TraceStep> steps;
  Terminal terminal = Terminal::StepLimit;

  friend bool operator==(const Trace&, const Trace&) = default;
};

nlohmann::json to_json(const Trace& t);
Trace trace_from_json(const nlohmann::json& j);
/// {"traces": [...]}, dumped with two-space indentation and a trailing newline.
std::string dump_traces(const std::vector<Trace>& traces);
std::vector<Trace> parse_traces(const std::string& text);

template <class Engine>
std::string model_hash(const Engine& e) {
  return hex64(fnv1a(e.model_text()));
}

template <class Engine>
std::uint64_t state_hash(const Engine& e, const typename Engine::State& s) {
  return fnv1a(e.key(s));
}

/// Picks uniformly among the canonical enabled modes at every step; stops at a
/// deadlock or after max_steps firings.
template <class Engine>
Trace simulate(const Engine& engine, const typename Engine::State& initial, std::uint64_t seed,
               std::size_t max_steps) {
  Trace trace;
  trace.model = model_hash(engine);
  trace.seed = seed;
  std::mt19937_64 rng(seed);
  auto cur = initial;
  std::uint64_t h = state_hash(engine, cur);
  for (std::size_t k = 0;; ++k) {
    if (k >= max_steps) {
      trace.terminal = Terminal::StepLimit;
      break;
    }
    auto modes = engine.modes(cur);
    if (modes.empty()) {
      trace.terminal = Terminal::Deadlock;
      break;
    }
    const Mode& m = modes[pnrd::uniform_index(rng, modes.size())];
    cur = engine.fire(cur, m);
    std::uint64_t next = state_hash(engine, cur);
    trace.steps.push_back({k, engine.transition_name(m), engine.binding(m), h, next});
    h = next;
  }
  return trace;
}

/// Fires a fixed mode list. Throws std::runtime_error when a scripted mode is
/// not enabled at its step.
template <class Engine>
Trace run_script(const Engine& engine, const typename Engine::State& initial, const std::vector<Mode>& script) {
  Trace trace;
  trace.model = model_hash(engine);
  auto cur = initial;
  std::uint64_t h = state_hash(engine, cur);
  for (std::size_t k = 0; k < script.size(); ++k) {
    auto modes = engine.modes(cur);
    auto it = std::find(modes.begin(), modes.end(), script[k]);
    if (it == modes.end())
      throw std::runtime_error("step " + std::to_string(k) + ": " + engine.transition_name(script[k]) +
                               " is not enabled with the scripted binding");
    cur = engine.fire(cur, *it);
    std::uint64_t next = state_hash(engine, cur);
    trace.steps.push_back({k, engine.transition_name(*it), engine.binding(*it), h, next});
    h = next;
  }
  trace.terminal = Terminal::ScriptedEnd;
  return trace;
}

struct ReplayResult {
  bool ok = true;
  std::size_t steps = 0;  // steps reproduced
  std::string error;
};

/// Re-fires the recorded modes and compares every pre/post state hash.
template <class Engine>
ReplayResult replay(const Engine& engine, const typename Engine::State& initial, const Trace& trace) {
  ReplayResult r;
  auto fail = [&](std::size_t k, std::string why) {
    r.ok = false;
    r.error = "step " + std::to_string(k) + ": " + std::move(why);
    return r;
  };
  if (trace.model != model_hash(engine)) return fail(0, "trace was recorded on a different model");
  auto cur = initial;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const TraceStep& st = trace.steps[k];
    if (st.index != k) return fail(k, "step index " + std::to_string(st.index) + " out of sequence");
    if (state_hash(engine, cur) != st.pre) return fail(k, "pre-state hash differs");
    std::optional<Mode> pick;
    for (const Mode& m : engine.modes(cur))
      if (engine.transition_name(m) == st.transition && engine.binding(m) == st.binding) {
        pick = m;
        break;
      }
    if (!pick) return fail(k, "mode " + st.transition + " is not enabled");
    cur = engine.fire(cur, *pick);
    if (state_hash(engine, cur) != st.post) return fail(k, "post-state hash differs");
    ++r.steps;
  }
  if (trace.terminal == Terminal::Deadlock && !engine.modes(cur).empty())
    return fail(trace.steps.size(), "trace ends in deadlock but modes are enabled");
  return r;
}

/// Columns: trace_id, step, timestamp, transition, then one column per binding
/// variable seen in any trace (sorted). Timestamp is the step index.
void write_csv(std::ostream& out, const std::vector<Trace>& traces);

}  // namespace learnflow::sim
