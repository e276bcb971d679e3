#include "learnflow/analysis.hpp"

#include "learnflow/lang/eval.hpp"

namespace learnflow::analysis {

using lang::Binding;
using lang::MatchResult;

HlGraph explore_hl(const pnrd::PnrdNet& net, const pnrd::PnrdState& initial, const ExploreBounds& bounds) {
  return pnrd::explore(net, initial, bounds);
}

std::optional<Binding> violation(const lang::InvariantInfo& inv, const pnrd::PnrdState& s) {
  // Token domain of each quantifier: distinct tokens of the summed places.
  std::vector<std::vector<const lang::Value*>> domains;
  for (const auto& [pattern, places] : inv.over) {
    std::vector<const lang::Value*> d;
    for (std::size_t p : places)
      for (const auto& [tok, _] : s.marking.tokens[p]) d.push_back(&tok);
    domains.push_back(std::move(d));
  }

  std::optional<Binding> found;
  auto search = [&](auto&& self, std::size_t q, const Binding& b) -> void {
    if (found) return;
    if (q == inv.over.size()) {
      if (!lang::eval_guard(inv.predicate, b, s.store)) found = b;
      return;
    }
    for (const lang::Value* tok : domains[q]) {
      Binding nb = b;
      MatchResult r = lang::match_pattern(*inv.over[q].first, *tok, nb, s.store);
      if (r == MatchResult::Deferred)
        throw lang::EvalError("invariant '" + inv.name + "': quantifier " + std::to_string(q + 1) +
                              " uses variables bound by a later quantifier");
      if (r == MatchResult::Matched) self(self, q + 1, nb);
      if (found) return;
    }
  };
  search(search, 0, Binding{});
  return found;
}

InvariantResult check_invariant(const HlGraph& graph, const lang::InvariantInfo& inv) {
  InvariantResult r;
  r.partial = graph.truncated;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (auto w = violation(inv, graph.states[i])) {
      r.holds = false;
      r.node = i;
      r.path = graph.path_to(i);
      r.witness = std::move(*w);
      return r;
    }
  }
  return r;
}

}  // namespace learnflow::analysis
