#pragma once

// Classical place/transition nets and workflow nets.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "learnflow/multiset.hpp"
#include "learnflow/state_graph.hpp"

namespace learnflow {

using PlaceIndex = std::size_t;
using TransitionIndex = std::size_t;

/// N = (P, T, F) with natural arc weights. Nodes are addressed by id; ids of
/// places and transitions are disjoint.
class PetriNet {
 public:
  struct Arc {
    std::size_t node;  // place index for presets/postsets
    Count weight;
  };

  PlaceIndex add_place(const std::string& id, std::string label = {});
  TransitionIndex add_transition(const std::string& id, std::string label = {});
  /// Adds weight to F(p, t); repeated calls accumulate.
  void add_input(const std::string& place, const std::string& transition, Count weight = 1);
  /// Adds weight to F(t, p).
  void add_output(const std::string& transition, const std::string& place, Count weight = 1);

  std::size_t place_count() const { return places_.size(); }
  std::size_t transition_count() const { return transitions_.size(); }
  const std::string& place_id(PlaceIndex p) const { return places_.at(p).id; }
  const std::string& transition_id(TransitionIndex t) const { return transitions_.at(t).id; }
  const std::string& place_label(PlaceIndex p) const;
  const std::string& transition_label(TransitionIndex t) const;

  std::optional<PlaceIndex> find_place(const std::string& id) const;
  std::optional<TransitionIndex> find_transition(const std::string& id) const;
  PlaceIndex place(const std::string& id) const;            // throws on unknown id
  TransitionIndex transition(const std::string& id) const;  // throws on unknown id

  Count input_weight(PlaceIndex p, TransitionIndex t) const;   // F(p, t)
  Count output_weight(TransitionIndex t, PlaceIndex p) const;  // F(t, p)
  const std::vector<Arc>& preset(TransitionIndex t) const { return transitions_.at(t).pre; }
  const std::vector<Arc>& postset(TransitionIndex t) const { return transitions_.at(t).post; }
  /// Transitions with an arc into / out of place p.
  std::vector<TransitionIndex> place_preset(PlaceIndex p) const;
  std::vector<TransitionIndex> place_postset(PlaceIndex p) const;

  /// The same net with every arc reversed.
  PetriNet reversed() const;

 private:
  struct Node {
    std::string id;
    std::string label;
  };
  struct TransitionNode : Node {
    std::vector<Arc> pre;
    std::vector<Arc> post;
  };
  void check_fresh(const std::string& id) const;
  static void bump(std::vector<Arc>& arcs, std::size_t node, Count weight);

  std::vector<Node> places_;
  std::vector<TransitionNode> transitions_;
  std::map<std::string, PlaceIndex> place_index_;
  std::map<std::string, TransitionIndex> transition_index_;
};

/// m : P -> Nat, stored densely by place index.
class PlainMarking {
 public:
  PlainMarking() = default;
  explicit PlainMarking(std::size_t places) : counts_(places, 0) {}
  static PlainMarking from_ids(const PetriNet& net, const std::map<std::string, Count>& counts);

  Count operator[](PlaceIndex p) const { return counts_.at(p); }
  Count& operator[](PlaceIndex p) { return counts_.at(p); }
  std::size_t place_count() const { return counts_.size(); }
  Count total() const;

  /// Canonical text "id:n,id:n" over nonzero places in place-id order.
  std::string key(const PetriNet& net) const;
  Multiset<std::string> as_multiset(const PetriNet& net) const;

  friend bool operator==(const PlainMarking&, const PlainMarking&) = default;

 private:
  std::vector<Count> counts_;
};

Multiset<std::string> preset_multiset(const PetriNet& net, TransitionIndex t);

bool pn_enabled(const PetriNet& net, const PlainMarking& m, TransitionIndex t);
bool pn_enabled(const PetriNet& net, const PlainMarking& m, const std::string& transition);
/// m'(p) = m(p) - F(p,t) + F(t,p). Throws std::logic_error if t is disabled.
PlainMarking pn_fire(const PetriNet& net, const PlainMarking& m, TransitionIndex t);
PlainMarking pn_fire(const PetriNet& net, const PlainMarking& m, const std::string& transition);
/// Enabled transitions in index order.
std::vector<TransitionIndex> pn_enabled_set(const PetriNet& net, const PlainMarking& m);

using PlainGraph = StateGraph<PlainMarking>;
/// BFS reachability graph; edge labels are transition ids.
PlainGraph explore(const PetriNet& net, const PlainMarking& m0, const ExploreBounds& bounds = {});

// --- workflow nets -------------------------------------------------------

struct WorkflowNet {
  PetriNet net;
  std::string source;
  std::string sink;
};

struct WfViolation {
  enum class Kind { SourceHasInput, SinkHasOutput, NotFromSource, NotToSink, SourceIsSink };
  Kind kind;
  std::string node;
  std::string message;
};

/// Empty report iff the net is a WF-net for the given source and sink.
/// Throws std::out_of_range for unknown ids.
std::vector<WfViolation> wf_validate(const PetriNet& net, const std::string& source,
                                     const std::string& sink);

struct SoundnessVerdict {
  enum class Status { Sound, Unsound, Inconclusive };
  Status status = Status::Inconclusive;
  std::vector<std::string> reasons;
  std::size_t states = 0;
};

/// Classical soundness over the graph explored from {source:1}: option to
/// complete, proper completion, no dead transitions. Structural violations are
/// reported as Unsound without a behavioral check.
SoundnessVerdict wf_soundness(const WorkflowNet& wf, const ExploreBounds& bounds = {});

const char* to_string(SoundnessVerdict::Status s);

}  // namespace learnflow
