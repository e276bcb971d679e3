#pragma once

// Colored Petri nets: typed markings, binding enumeration, mode firing.

#include <string>
#include <vector>

#include "learnflow/lang/model.hpp"
#include "learnflow/mode.hpp"
#include "learnflow/state_graph.hpp"

namespace learnflow::cpn {

using lang::Binding;
using lang::TokenBag;

/// m : P -> multisets of tokens of the place type, indexed like Model::places.
struct ColoredMarking {
  std::vector<TokenBag> tokens;

  std::string key(const lang::Model& model) const { return marking_key(model, tokens); }
  friend bool operator==(const ColoredMarking&, const ColoredMarking&) = default;
};

/// (P, T, F, τ, γ, ε): a checked model without pointers or operators.
class ColoredNet {
 public:
  /// Throws std::invalid_argument if the model uses pointers, Ref types or operators.
  explicit ColoredNet(lang::ModelPtr model);

  const lang::Model& model() const { return *model_; }
  const lang::ModelPtr& model_ptr() const { return model_; }
  ColoredMarking initial_marking() const;
  /// Transition index by name; throws std::out_of_range.
  std::size_t transition(const std::string& name) const { return model_->transition(name); }

 private:
  lang::ModelPtr model_;
};

/// All bindings of t enabled in m, sorted by their serialization.
std::vector<Binding> enumerate_bindings(const ColoredNet& net, const ColoredMarking& m, std::size_t t);
/// ε(p,t)(b) ⊆ m(p) for all p and the guard holds. Throws std::invalid_argument
/// for an incomplete binding.
bool enabled(const ColoredNet& net, const ColoredMarking& m, std::size_t t, const Binding& b);
/// m'(p) = (m(p) - ε(p,t)(b)) + ε(t,p)(b). Throws std::logic_error if disabled.
ColoredMarking fire(const ColoredNet& net, const ColoredMarking& m, std::size_t t, const Binding& b);
/// Every enabled (transition, binding), ordered by transition name then binding text.
std::vector<Mode> enabled_modes(const ColoredNet& net, const ColoredMarking& m);

/// True iff every token has its place's type.
bool well_typed(const lang::Model& model, const ColoredMarking& m);

using ColoredGraph = StateGraph<ColoredMarking>;
ColoredGraph explore(const ColoredNet& net, const ColoredMarking& m0, const ExploreBounds& bounds = {});

}  // namespace learnflow::cpn
