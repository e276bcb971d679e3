#include "learnflow/petri_net.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace learnflow {

void PetriNet::check_fresh(const std::string& id) const {
  if (id.empty()) throw std::invalid_argument("node id must be nonempty");
  if (place_index_.count(id) || transition_index_.count(id))
    throw std::invalid_argument("duplicate node id '" + id + "'");
}

PlaceIndex PetriNet::add_place(const std::string& id, std::string label) {
  check_fresh(id);
  places_.push_back({id, std::move(label)});
  place_index_[id] = places_.size() - 1;
  return places_.size() - 1;
}

TransitionIndex PetriNet::add_transition(const std::string& id, std::string label) {
  check_fresh(id);
  TransitionNode node;
  node.id = id;
  node.label = std::move(label);
  transitions_.push_back(std::move(node));
  transition_index_[id] = transitions_.size() - 1;
  return transitions_.size() - 1;
}

void PetriNet::bump(std::vector<Arc>& arcs, std::size_t node, Count weight) {
  for (auto& a : arcs) {
    if (a.node == node) {
      a.weight += weight;
      return;
    }
  }
  arcs.push_back({node, weight});
  std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) { return x.node < y.node; });
}

void PetriNet::add_input(const std::string& place_id, const std::string& transition_id,
                         Count weight) {
  PlaceIndex p = place(place_id);
  TransitionIndex t = transition(transition_id);
  if (weight == 0) return;
  bump(transitions_[t].pre, p, weight);
}

void PetriNet::add_output(const std::string& transition_id, const std::string& place_id,
                          Count weight) {
  PlaceIndex p = place(place_id);
  TransitionIndex t = transition(transition_id);
  if (weight == 0) return;
  bump(transitions_[t].post, p, weight);
}

const std::string& PetriNet::place_label(PlaceIndex p) const {
  const auto& n = places_.at(p);
  return n.label.empty() ? n.id : n.label;
}

const std::string& PetriNet::transition_label(TransitionIndex t) const {
  const auto& n = transitions_.at(t);
  return n.label.empty() ? n.id : n.label;
}

std::optional<PlaceIndex> PetriNet::find_place(const std::string& id) const {
  auto it = place_index_.find(id);
  if (it == place_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TransitionIndex> PetriNet::find_transition(const std::string& id) const {
  auto it = transition_index_.find(id);
  if (it == transition_index_.end()) return std::nullopt;
  return it->second;
}

PlaceIndex PetriNet::place(const std::string& id) const {
  auto p = find_place(id);
  if (!p) throw std::out_of_range("unknown place '" + id + "'");
  return *p;
}

TransitionIndex PetriNet::transition(const std::string& id) const {
  auto t = find_transition(id);
  if (!t) throw std::out_of_range("unknown transition '" + id + "'");
  return *t;
}

Count PetriNet::input_weight(PlaceIndex p, TransitionIndex t) const {
  for (const auto& a : transitions_.at(t).pre)
    if (a.node == p) return a.weight;
  return 0;
}

Count PetriNet::output_weight(TransitionIndex t, PlaceIndex p) const {
  for (const auto& a : transitions_.at(t).post)
    if (a.node == p) return a.weight;
  return 0;
}

std::vector<TransitionIndex> PetriNet::place_preset(PlaceIndex p) const {
  std::vector<TransitionIndex> out;
  for (TransitionIndex t = 0; t < transitions_.size(); ++t)
    if (output_weight(t, p) > 0) out.push_back(t);
  return out;
}

std::vector<TransitionIndex> PetriNet::place_postset(PlaceIndex p) const {
  std::vector<TransitionIndex> out;
  for (TransitionIndex t = 0; t < transitions_.size(); ++t)
    if (input_weight(p, t) > 0) out.push_back(t);
  return out;
}

PetriNet PetriNet::reversed() const {
  PetriNet r;
  for (const auto& p : places_) r.add_place(p.id, p.label);
  for (const auto& t : transitions_) r.add_transition(t.id, t.label);
  for (const auto& t : transitions_) {
    for (const auto& a : t.pre) r.add_output(t.id, places_[a.node].id, a.weight);
    for (const auto& a : t.post) r.add_input(places_[a.node].id, t.id, a.weight);
  }
  return r;
}

// --- markings ------------------------------------------------------------

PlainMarking PlainMarking::from_ids(const PetriNet& net, const std::map<std::string, Count>& counts) {
  PlainMarking m(net.place_count());
  for (const auto& [id, n] : counts) m[net.place(id)] = n;
  return m;
}

Count PlainMarking::total() const {
  Count sum = 0;
  for (Count c : counts_) sum += c;
  return sum;
}

std::string PlainMarking::key(const PetriNet& net) const {
  std::map<std::string, Count> sorted;
  for (PlaceIndex p = 0; p < counts_.size(); ++p)
    if (counts_[p] > 0) sorted[net.place_id(p)] = counts_[p];
  std::string out;
  for (const auto& [id, n] : sorted) {
    if (!out.empty()) out += ',';
    out += id;
    out += ':';
    out += std::to_string(n);
  }
  return out;
}

Multiset<std::string> PlainMarking::as_multiset(const PetriNet& net) const {
  Multiset<std::string> m;
  for (PlaceIndex p = 0; p < counts_.size(); ++p) m.add(net.place_id(p), counts_[p]);
  return m;
}

Multiset<std::string> preset_multiset(const PetriNet& net, TransitionIndex t) {
  Multiset<std::string> m;
  for (const auto& a : net.preset(t)) m.add(net.place_id(a.node), a.weight);
  return m;
}

// --- firing --------------------------------------------------------------

bool pn_enabled(const PetriNet& net, const PlainMarking& m, TransitionIndex t) {
  for (const auto& a : net.preset(t))
    if (m[a.node] < a.weight) return false;
  return true;
}

bool pn_enabled(const PetriNet& net, const PlainMarking& m, const std::string& transition) {
  return pn_enabled(net, m, net.transition(transition));
}

PlainMarking pn_fire(const PetriNet& net, const PlainMarking& m, TransitionIndex t) {
  if (!pn_enabled(net, m, t))
    throw std::logic_error("transition '" + net.transition_id(t) + "' is not enabled");
  PlainMarking next = m;
  for (const auto& a : net.preset(t)) next[a.node] -= a.weight;
  for (const auto& a : net.postset(t)) {
    if (next[a.node] > ~Count{0} - a.weight) throw std::overflow_error("token count overflow");
    next[a.node] += a.weight;
  }
  return next;
}

PlainMarking pn_fire(const PetriNet& net, const PlainMarking& m, const std::string& transition) {
  return pn_fire(net, m, net.transition(transition));
}

std::vector<TransitionIndex> pn_enabled_set(const PetriNet& net, const PlainMarking& m) {
  std::vector<TransitionIndex> out;
  for (TransitionIndex t = 0; t < net.transition_count(); ++t)
    if (pn_enabled(net, m, t)) out.push_back(t);
  return out;
}

PlainGraph explore(const PetriNet& net, const PlainMarking& m0, const ExploreBounds& bounds) {
  if (bounds.max_states == 0 || bounds.max_depth == 0)
    throw std::invalid_argument("exploration bounds must be positive");
  auto successors = [&](const PlainMarking& m) {
    std::vector<std::pair<std::string, PlainMarking>> out;
    for (TransitionIndex t : pn_enabled_set(net, m)) out.emplace_back(net.transition_id(t), pn_fire(net, m, t));
    return out;
  };
  auto key = [&](const PlainMarking& m) { return m.key(net); };
  return explore_bfs(m0, successors, key, bounds);
}

// --- workflow nets -------------------------------------------------------

namespace {

// Forward reachability over the bipartite graph; node ids: places [0, P),
// transitions [P, P+T).
std::vector<bool> reach(const PetriNet& net, PlaceIndex start, bool forward) {
  std::size_t np = net.place_count();
  std::vector<bool> seen(np + net.transition_count(), false);
  std::deque<std::size_t> queue{start};
  seen[start] = true;
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    std::vector<std::size_t> next;
    if (n < np) {
      for (TransitionIndex t : forward ? net.place_postset(n) : net.place_preset(n)) next.push_back(np + t);
    } else {
      for (const auto& a : forward ? net.postset(n - np) : net.preset(n - np)) next.push_back(a.node);
    }
    for (std::size_t x : next) {
      if (!seen[x]) {
        seen[x] = true;
        queue.push_back(x);
      }
    }
  }
  return seen;
}

}  // namespace

std::vector<WfViolation> wf_validate(const PetriNet& net, const std::string& source,
                                     const std::string& sink) {
  PlaceIndex i = net.place(source);
  PlaceIndex f = net.place(sink);
  std::vector<WfViolation> report;
  using K = WfViolation::Kind;
  if (i == f) report.push_back({K::SourceIsSink, source, "source and sink are the same place"});
  for (TransitionIndex t : net.place_preset(i))
    report.push_back({K::SourceHasInput, source,
                      "source place '" + source + "' has incoming arc from '" + net.transition_id(t) + "'"});
  for (TransitionIndex t : net.place_postset(f))
    report.push_back({K::SinkHasOutput, sink,
                      "sink place '" + sink + "' has outgoing arc to '" + net.transition_id(t) + "'"});

  auto from_i = reach(net, i, true);
  auto to_f = reach(net, f, false);
  std::size_t np = net.place_count();
  auto name = [&](std::size_t n) { return n < np ? net.place_id(n) : net.transition_id(n - np); };
  for (std::size_t n = 0; n < from_i.size(); ++n) {
    if (!from_i[n])
      report.push_back({K::NotFromSource, name(n), "node '" + name(n) + "' is not reachable from the source"});
    if (!to_f[n])
      report.push_back({K::NotToSink, name(n), "node '" + name(n) + "' cannot reach the sink"});
  }
  return report;
}

SoundnessVerdict wf_soundness(const WorkflowNet& wf, const ExploreBounds& bounds) {
  SoundnessVerdict verdict;
  auto structural = wf_validate(wf.net, wf.source, wf.sink);
  if (!structural.empty()) {
    verdict.status = SoundnessVerdict::Status::Unsound;
    for (const auto& v : structural) verdict.reasons.push_back("structure: " + v.message);
    return verdict;
  }
  const PetriNet& net = wf.net;
  PlaceIndex i = net.place(wf.source);
  PlaceIndex f = net.place(wf.sink);
  PlainMarking m0(net.place_count());
  m0[i] = 1;
  PlainMarking final_marking(net.place_count());
  final_marking[f] = 1;

  PlainGraph g = explore(net, m0, bounds);
  verdict.states = g.size();
  if (g.truncated) {
    verdict.status = SoundnessVerdict::Status::Inconclusive;
    verdict.reasons.push_back("state space exceeded the exploration bounds");
    return verdict;
  }

  // (a) option to complete: backward reachability from the final marking.
  std::vector<std::vector<std::size_t>> incoming(g.size());
  for (const auto& e : g.edges) incoming[e.to].push_back(e.from);
  std::vector<bool> can_finish(g.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.states[n] == final_marking) {
      can_finish[n] = true;
      queue.push_back(n);
    }
  }
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    for (std::size_t pred : incoming[n]) {
      if (!can_finish[pred]) {
        can_finish[pred] = true;
        queue.push_back(pred);
      }
    }
  }
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!can_finish[n])
      verdict.reasons.push_back("option to complete: final marking unreachable from {" + g.keys[n] + "}");
    // (b) proper completion
    if (g.states[n][f] > 0 && !(g.states[n] == final_marking))
      verdict.reasons.push_back("proper completion: marking {" + g.keys[n] + "} marks the sink with leftovers");
  }
  // (c) no dead transitions
  std::set<std::string> fired;
  for (const auto& e : g.edges) fired.insert(e.label);
  for (TransitionIndex t = 0; t < net.transition_count(); ++t)
    if (!fired.count(net.transition_id(t)))
      verdict.reasons.push_back("dead transition: '" + net.transition_id(t) + "' never fires");

  verdict.status = verdict.reasons.empty() ? SoundnessVerdict::Status::Sound : SoundnessVerdict::Status::Unsound;
  return verdict;
}

const char* to_string(SoundnessVerdict::Status s) {
  switch (s) {
    case SoundnessVerdict::Status::Sound: return "sound";
    case SoundnessVerdict::Status::Unsound: return "unsound";
    case SoundnessVerdict::Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace learnflow
