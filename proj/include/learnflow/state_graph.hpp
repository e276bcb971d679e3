#pragma once

// Breadth-first reachability graphs shared by every engine level.

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace learnflow {

struct ExploreBounds {
  std::size_t max_states = 100000;
  std::size_t max_depth = static_cast<std::size_t>(-1);
};

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string label;
};

/// Reachable states in BFS discovery order. Node identity is the canonical
/// serialization of the state (`keys`). `parent`/`parent_edge` form a BFS tree
/// so root-to-node paths are shortest.
template <class State>
struct StateGraph {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<State> states;
  std::vector<std::string> keys;
  std::vector<GraphEdge> edges;
  std::vector<std::size_t> depth;
  std::vector<std::size_t> parent_edge;  // npos for the root
  std::vector<bool> expanded;            // successors were computed
  std::vector<std::size_t> out_degree;   // number of enabled modes (when expanded)
  std::size_t root = 0;
  bool truncated = false;

  std::size_t size() const { return states.size(); }

  std::optional<std::size_t> find(const std::string& key) const {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == key) return i;
    return std::nullopt;
  }

  /// Edge indices along the BFS tree from the root to `node`.
  std::vector<std::size_t> path_to(std::size_t node) const {
    std::vector<std::size_t> path;
    while (parent_edge[node] != npos) {
      path.push_back(parent_edge[node]);
      node = edges[parent_edge[node]].from;
    }
    return {path.rbegin(), path.rend()};
  }
};

/// Generic BFS. `successors(state)` returns (label, next state) pairs in a
/// deterministic order; `key(state)` is the canonical serialization.
template <class State, class Successors, class Key>
StateGraph<State> explore_bfs(State initial, Successors&& successors, Key&& key,
                              const ExploreBounds& bounds) {
  using Graph = StateGraph<State>;
  Graph g;
  std::unordered_map<std::string, std::size_t> index;

  auto add_node = [&](State s, std::string k, std::size_t d, std::size_t via) {
    std::size_t id = g.states.size();
    index.emplace(k, id);
    g.states.push_back(std::move(s));
    g.keys.push_back(std::move(k));
    g.depth.push_back(d);
    g.parent_edge.push_back(via);
    g.expanded.push_back(false);
    g.out_degree.push_back(0);
    return id;
  };

  if (bounds.max_states == 0) {
    g.truncated = true;
    return g;
  }
  std::string root_key = key(initial);
  add_node(std::move(initial), std::move(root_key), 0, Graph::npos);

  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t cur = frontier.front();
    frontier.pop_front();
    auto succ = successors(g.states[cur]);
    if (g.depth[cur] >= bounds.max_depth) {
      if (!succ.empty()) g.truncated = true;
      continue;
    }
    g.expanded[cur] = true;
    g.out_degree[cur] = succ.size();
    for (auto& [label, next] : succ) {
      std::string k = key(next);
      auto it = index.find(k);
      std::size_t target;
      if (it != index.end()) {
        target = it->second;
      } else {
        if (g.states.size() >= bounds.max_states) {
          g.truncated = true;
          continue;
        }
        target = add_node(std::move(next), std::move(k), g.depth[cur] + 1, g.edges.size());
        frontier.push_back(target);
      }
      g.edges.push_back({cur, target, std::move(label)});
    }
  }
  return g;
}

}  // namespace learnflow
