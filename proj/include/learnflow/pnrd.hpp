#pragma once

// Petri nets with reference data: states (m, s) where tokens may carry
// pointers into a global store, and transitions carry store operators.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "learnflow/cpn.hpp"
#include "learnflow/lang/eval.hpp"
#include "learnflow/lang/model.hpp"
#include "learnflow/mode.hpp"
#include "learnflow/state_graph.hpp"

namespace learnflow::pnrd {

using cpn::ColoredMarking;
using lang::Binding;
using lang::GlobalStore;

/// σ = (m, s)
struct PnrdState {
  ColoredMarking marking;
  GlobalStore store;

  std::string key(const lang::Model& model) const { return marking.key(model) + "|" + store.key(); }
  friend bool operator==(const PnrdState&, const PnrdState&) = default;
};

/// (P, T, F, τ, γ, θ, ε)
class PnrdNet {
 public:
  explicit PnrdNet(lang::ModelPtr model);

  const lang::Model& model() const { return *model_; }
  const lang::ModelPtr& model_ptr() const { return model_; }
  /// Initial marking from the places section; store from the pointers section.
  PnrdState initial_state() const;
  std::size_t transition(const std::string& name) const { return model_->transition(name); }

 private:
  lang::ModelPtr model_;
};

/// Bindings over value and reference variables, guards evaluated against σ.store.
std::vector<Binding> enumerate_bindings(const PnrdNet& net, const PnrdState& s, std::size_t t);
/// ν(ε(p,t), b, s) ⊆ m(p) for all p and the guard holds under (b, s).
bool enabled(const PnrdNet& net, const PnrdState& s, std::size_t t, const Binding& b);
/// Evaluates guards and input demands under the pre-firing store, consumes,
/// applies θ(t), then evaluates outputs under the new store and produces.
/// Throws std::logic_error if disabled; lang::EvalError on a dangling pointer.
PnrdState fire(const PnrdNet& net, const PnrdState& s, std::size_t t, const Binding& b);
/// Every enabled mode, ordered by transition name then binding text.
std::vector<Mode> enabled_modes(const PnrdNet& net, const PnrdState& s);

/// Pointers that occur in some token but are not allocated in the store.
std::vector<std::string> dangling_pointers(const PnrdState& s);

/// Chooses the next mode of a run: a seeded uniform choice or a fixed script.
class Policy {
 public:
  static Policy seeded(std::uint64_t seed);
  static Policy scripted(std::vector<Mode> script);

  /// Index into `modes`, or nullopt to stop. Scripted policies throw
  /// std::runtime_error when the scripted mode is not enabled.
  std::optional<std::size_t> choose(const lang::Model& model, const std::vector<Mode>& modes, std::size_t step);
  bool is_scripted() const { return scripted_; }
  std::size_t script_length() const { return script_.size(); }

 private:
  bool scripted_ = false;
  std::mt19937_64 rng_;
  std::vector<Mode> script_;
};

struct RunStep {
  Mode mode;
  PnrdState state;
};

/// σ0 → σ1 → … until no mode is enabled, the script ends, or max_steps.
std::vector<RunStep> run(const PnrdNet& net, const PnrdState& initial, Policy policy, std::size_t max_steps);

using PnrdGraph = StateGraph<PnrdState>;
PnrdGraph explore(const PnrdNet& net, const PnrdState& initial, const ExploreBounds& bounds = {});

/// Uniform index in [0, n) from a 64-bit generator; n > 0.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

}  // namespace learnflow::pnrd
