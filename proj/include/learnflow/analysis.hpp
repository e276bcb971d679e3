#pragma once

// Reachability analysis over high-level states: invariants with shortest
// counterexamples, deadlocks, graph export.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "learnflow/lang/model.hpp"
#include "learnflow/pnrd.hpp"
#include "learnflow/state_graph.hpp"

namespace learnflow::analysis {

using HlGraph = pnrd::PnrdGraph;

/// BFS over (marking, store) states. Works for colored models too, whose
/// store stays empty.
HlGraph explore_hl(const pnrd::PnrdNet& net, const pnrd::PnrdState& initial, const ExploreBounds& bounds = {});

/// First quantifier assignment that falsifies the predicate in `s`, or
/// nullopt if the invariant holds there. Throws lang::EvalError when a
/// pattern cannot be matched (needs a later quantifier's variables).
std::optional<lang::Binding> violation(const lang::InvariantInfo& inv, const pnrd::PnrdState& s);

struct InvariantResult {
  bool holds = true;
  bool partial = false;  // graph was truncated: "holds on the explored prefix"
  std::size_t node = 0;  // violating state when !holds
  std::vector<std::size_t> path;  // edge indices from the root to `node`
  lang::Binding witness;
};

/// Evaluates the invariant at every node in BFS order, so the first violation
/// found has a shortest path from the root.
InvariantResult check_invariant(const HlGraph& graph, const lang::InvariantInfo& inv);

/// Nodes that were expanded and have no enabled mode.
template <class State>
std::vector<std::size_t> find_deadlocks(const StateGraph<State>& g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.expanded[i] && g.out_degree[i] == 0) out.push_back(i);
  return out;
}

/// Graph as DOT: nodes labelled with their canonical keys, edges with mode labels.
template <class State>
std::string to_dot(const StateGraph<State>& g) {
  auto esc = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '"' || c == '\\') o += '\\';
      o += c;
    }
    return o;
  };
  std::string out = "digraph states {\n  node [shape=box, fontsize=10];\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    out += "  s" + std::to_string(i) + " [label=\"" + esc(g.keys[i]) + "\"";
    if (i == g.root) out += ", penwidth=2";
    out += "];\n";
  }
  for (const auto& e : g.edges)
    out += "  s" + std::to_string(e.from) + " -> s" + std::to_string(e.to) + " [label=\"" + esc(e.label) + "\"];\n";
  return out + "}\n";
}

template <class State>
nlohmann::json to_json(const StateGraph<State>& g) {
  nlohmann::json states = nlohmann::json::array(), edges = nlohmann::json::array();
  for (std::size_t i = 0; i < g.size(); ++i)
    states.push_back({{"id", i}, {"key", g.keys[i]}, {"depth", g.depth[i]}});
  for (const auto& e : g.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"label", e.label}});
  return {{"root", g.root}, {"truncated", g.truncated}, {"states", states}, {"edges", edges}};
}

/// Labels along a path of edge indices.
template <class State>
std::vector<std::string> path_labels(const StateGraph<State>& g, const std::vector<std::size_t>& path) {
  std::vector<std::string> out;
  for (std::size_t e : path) out.push_back(g.edges[e].label);
  return out;
}

}  // namespace learnflow::analysis
