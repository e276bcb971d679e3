#include "learnflow/net_io.hpp"

#include <stdexcept>

namespace learnflow {

using nlohmann::json;

namespace {
std::string req_string(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string())
    throw std::invalid_argument(std::string(what) + " needs a string '" + key + "'");
  return j.at(key).get<std::string>();
}

Count opt_count(const json& j, const char* key, Count dflt) {
  if (!j.contains(key)) return dflt;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw std::invalid_argument(std::string("'") + key + "' must be a natural number");
  return v.get<Count>();
}
}  // namespace

ClassicalNet net_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("net must be a JSON object");
  ClassicalNet out;
  std::map<std::string, Count> tokens;
  for (const auto& p : j.value("places", json::array())) {
    std::string id = req_string(p, "id", "place");
    out.net.add_place(id, p.value("label", std::string{}));
    if (Count n = opt_count(p, "tokens", 0)) tokens[id] = n;
  }
  for (const auto& t : j.value("transitions", json::array()))
    out.net.add_transition(req_string(t, "id", "transition"), t.value("label", std::string{}));
  for (const auto& a : j.value("arcs", json::array())) {
    std::string from = req_string(a, "from", "arc"), to = req_string(a, "to", "arc");
    Count w = opt_count(a, "weight", 1);
    if (w == 0) throw std::invalid_argument("arc " + from + " -> " + to + " has weight 0");
    if (out.net.find_place(from) && out.net.find_transition(to)) out.net.add_input(from, to, w);
    else if (out.net.find_transition(from) && out.net.find_place(to)) out.net.add_output(from, to, w);
    else throw std::invalid_argument("arc " + from + " -> " + to + " must join a place and a transition");
  }
  out.initial = PlainMarking::from_ids(out.net, tokens);
  if (j.contains("source")) out.source = j.at("source").get<std::string>();
  else out.source = infer_source(out.net);
  if (j.contains("sink")) out.sink = j.at("sink").get<std::string>();
  else out.sink = infer_sink(out.net);
  return out;
}

json net_to_json(const ClassicalNet& n) {
  json places = json::array(), transitions = json::array(), arcs = json::array();
  for (PlaceIndex p = 0; p < n.net.place_count(); ++p) {
    json e{{"id", n.net.place_id(p)}};
    if (n.net.place_label(p) != n.net.place_id(p)) e["label"] = n.net.place_label(p);
    if (n.initial[p]) e["tokens"] = n.initial[p];
    places.push_back(std::move(e));
  }
  for (TransitionIndex t = 0; t < n.net.transition_count(); ++t) {
    json e{{"id", n.net.transition_id(t)}};
    if (n.net.transition_label(t) != n.net.transition_id(t)) e["label"] = n.net.transition_label(t);
    transitions.push_back(std::move(e));
    for (const auto& a : n.net.preset(t))
      arcs.push_back({{"from", n.net.place_id(a.node)}, {"to", n.net.transition_id(t)}, {"weight", a.weight}});
    for (const auto& a : n.net.postset(t))
      arcs.push_back({{"from", n.net.transition_id(t)}, {"to", n.net.place_id(a.node)}, {"weight", a.weight}});
  }
  json j{{"places", places}, {"transitions", transitions}, {"arcs", arcs}};
  if (n.source) j["source"] = *n.source;
  if (n.sink) j["sink"] = *n.sink;
  return j;
}

ClassicalNet classical_from_model(const lang::Model& model) {
  if (!model.is_classical()) throw std::invalid_argument("model is not a classical net (non-Unit places or variables)");
  ClassicalNet out;
  std::map<std::string, Count> tokens;
  for (const auto& p : model.places) {
    out.net.add_place(p.name);
    if (p.initial.size()) tokens[p.name] = p.initial.size();
  }
  for (const auto& t : model.transitions) {
    out.net.add_transition(t.name);
    auto weight = [](const lang::Inscription& ins) {
      Count w = 0;
      for (const auto& term : ins.terms) w += term.count;
      return w;
    };
    for (const auto& a : t.inputs)
      if (Count w = weight(a.inscription)) out.net.add_input(model.places[a.place].name, t.name, w);
    for (const auto& a : t.outputs)
      if (Count w = weight(a.inscription)) out.net.add_output(t.name, model.places[a.place].name, w);
  }
  out.initial = PlainMarking::from_ids(out.net, tokens);
  out.source = infer_source(out.net);
  out.sink = infer_sink(out.net);
  return out;
}

std::optional<std::string> infer_source(const PetriNet& net) {
  std::optional<std::string> found;
  for (PlaceIndex p = 0; p < net.place_count(); ++p) {
    if (!net.place_preset(p).empty()) continue;
    if (found) return std::nullopt;
    found = net.place_id(p);
  }
  return found;
}

std::optional<std::string> infer_sink(const PetriNet& net) {
  std::optional<std::string> found;
  for (PlaceIndex p = 0; p < net.place_count(); ++p) {
    if (!net.place_postset(p).empty()) continue;
    if (found) return std::nullopt;
    found = net.place_id(p);
  }
  return found;
}

}  // namespace learnflow
