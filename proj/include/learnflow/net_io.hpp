#pragma once

// Loading classical nets: the JSON structural format and Unit-typed models.

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "learnflow/lang/model.hpp"
#include "learnflow/petri_net.hpp"

namespace learnflow {

struct ClassicalNet {
  PetriNet net;
  PlainMarking initial;
  std::optional<std::string> source;  // declared or inferred
  std::optional<std::string> sink;
};

/// {"places": [{"id", "label"?, "tokens"?}], "transitions": [{"id", "label"?}],
///  "arcs": [{"from", "to", "weight"?}], "source"?, "sink"?}
/// Throws std::invalid_argument on malformed input.
ClassicalNet net_from_json(const nlohmann::json& j);
nlohmann::json net_to_json(const ClassicalNet& n);

/// A classical model (every place Unit, constant inscriptions) as a P/T net.
/// Arc weight = total multiplicity of the inscription. Throws
/// std::invalid_argument if the model is not classical.
ClassicalNet classical_from_model(const lang::Model& model);

/// The unique place with an empty preset / postset, if there is exactly one.
std::optional<std::string> infer_source(const PetriNet& net);
std::optional<std::string> infer_sink(const PetriNet& net);

}  // namespace learnflow
