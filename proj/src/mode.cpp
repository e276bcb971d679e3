#include "learnflow/mode.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace learnflow {

using lang::Binding;
using lang::Expr;
using lang::GlobalStore;
using lang::MatchResult;
using lang::Model;
using lang::TokenBag;

std::vector<std::pair<std::string, Count>> canonical_entries(const TokenBag& bag) {
  std::vector<std::pair<std::string, Count>> out;
  out.reserve(bag.distinct());
  for (const auto& [v, n] : bag) out.emplace_back(v.to_string(), n);
  std::sort(out.begin(), out.end());
  return out;
}

std::string marking_key(const Model& model, const std::vector<TokenBag>& marking) {
  std::vector<std::size_t> order(marking.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return model.places[a].name < model.places[b].name; });
  std::string s;
  for (std::size_t p : order) {
    if (marking[p].empty()) continue;
    if (!s.empty()) s += ';';
    s += model.places[p].name + ":";
    bool first = true;
    for (const auto& [text, n] : canonical_entries(marking[p])) {
      if (!first) s += ',';
      first = false;
      s += std::to_string(n) + "'" + text;
    }
  }
  return s;
}

namespace detail {

void require_complete(const Model& model, std::size_t transition, const Binding& b) {
  const auto& t = model.transitions.at(transition);
  for (const auto& v : t.variables)
    if (!b.has(v)) throw std::invalid_argument("incomplete binding for '" + t.name + "': variable '" + v + "' unbound");
}

bool mode_enabled(const Model& model, const std::vector<TokenBag>& marking, const GlobalStore& store,
                  std::size_t transition, const Binding& b) {
  const auto& t = model.transitions.at(transition);
  for (const auto& arc : t.inputs)
    if (!ms_leq(lang::eval_inscription(arc.inscription, b, store), marking[arc.place])) return false;
  return lang::eval_guard(t.guard, b, store);
}

std::vector<Binding> search_bindings(const Model& model, const std::vector<TokenBag>& marking,
                                     const GlobalStore& store, std::size_t transition) {
  const auto& t = model.transitions.at(transition);
  struct Term {
    std::size_t place;
    const Expr* expr;
    std::vector<std::string> required;
  };
  std::vector<Term> terms;
  for (const auto& arc : t.inputs) {
    for (const auto& term : arc.inscription.terms) {
      Term x{arc.place, term.expr.get(), {}};
      lang::required_variables(*term.expr, x.required);
      terms.push_back(std::move(x));
    }
  }
  // A place whose demand cannot be met makes the search pointless.
  for (const auto& arc : t.inputs)
    if (marking[arc.place].empty()) return {};

  std::set<Binding> found;
  std::vector<bool> used(terms.size(), false);

  auto ready = [&](const Term& term, const Binding& b) {
    return std::all_of(term.required.begin(), term.required.end(), [&](const std::string& v) { return b.has(v); });
  };

  auto search = [&](auto&& self, const Binding& b, std::size_t done) -> void {
    if (done == terms.size()) {
      if (mode_enabled(model, marking, store, transition, b)) found.insert(b);
      return;
    }
    std::size_t pick = terms.size();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (used[i]) continue;
      if (pick == terms.size()) pick = i;  // fallback when no term is ready
      if (ready(terms[i], b)) {
        pick = i;
        break;
      }
    }
    const Term& term = terms[pick];
    used[pick] = true;
    for (const auto& [token, _] : marking[term.place]) {
      Binding nb = b;
      MatchResult r = lang::match_pattern(*term.expr, token, nb, store);
      // Bindings made by one part of a pattern may unblock another part.
      while (r == MatchResult::Deferred && nb.values().size() > b.values().size()) {
        Binding retry = nb;
        r = lang::match_pattern(*term.expr, token, retry, store);
        if (retry.values().size() == nb.values().size() && r == MatchResult::Deferred) break;
        nb = std::move(retry);
      }
      if (r == MatchResult::Matched) self(self, nb, done + 1);
    }
    used[pick] = false;
  };
  search(search, Binding{}, 0);
  return {found.begin(), found.end()};
}

}  // namespace detail
}  // namespace learnflow
