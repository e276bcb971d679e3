#pragma once

// Uniform adapters over the three semantics so the simulator, the service and
// the CLI can drive any level the same way. Every adapter exposes:
//   State initial() const
//   std::vector<Mode> modes(const State&) const      canonical order
//   State fire(const State&, const Mode&) const
//   std::string key(const State&) const              canonical serialization
//   std::string transition_name(const Mode&) const
//   std::vector<std::pair<std::string, std::string>> binding(const Mode&) const
//   std::string model_text() const                   input to the model hash

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "learnflow/cpn.hpp"
#include "learnflow/mode.hpp"
#include "learnflow/net_io.hpp"
#include "learnflow/petri_net.hpp"
#include "learnflow/pnrd.hpp"

namespace learnflow {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t h);

std::vector<std::pair<std::string, std::string>> binding_fields(const lang::Binding& b);

class ClassicalEngine {
 public:
  using State = PlainMarking;

  explicit ClassicalEngine(ClassicalNet net) : net_(std::move(net)) {}

  const PetriNet& net() const { return net_.net; }
  State initial() const { return net_.initial; }
  /// Enabled transitions in id order, each with an empty binding.
  std::vector<Mode> modes(const State& m) const;
  State fire(const State& m, const Mode& mode) const { return pn_fire(net_.net, m, mode.transition); }
  std::string key(const State& m) const { return m.key(net_.net); }
  std::string transition_name(const Mode& mode) const { return net_.net.transition_id(mode.transition); }
  std::vector<std::pair<std::string, std::string>> binding(const Mode&) const { return {}; }
  std::string model_text() const;

 private:
  ClassicalNet net_;
};

class ColoredEngine {
 public:
  using State = cpn::ColoredMarking;

  explicit ColoredEngine(lang::ModelPtr model) : net_(std::move(model)) {}

  const cpn::ColoredNet& net() const { return net_; }
  const lang::Model& model() const { return net_.model(); }
  State initial() const { return net_.initial_marking(); }
  std::vector<Mode> modes(const State& m) const { return cpn::enabled_modes(net_, m); }
  State fire(const State& m, const Mode& mode) const { return cpn::fire(net_, m, mode.transition, mode.binding); }
  std::string key(const State& m) const { return m.key(net_.model()); }
  std::string transition_name(const Mode& mode) const { return model().transitions.at(mode.transition).name; }
  std::vector<std::pair<std::string, std::string>> binding(const Mode& mode) const {
    return binding_fields(mode.binding);
  }
  std::string model_text() const;

 private:
  cpn::ColoredNet net_;
};

class ReferenceEngine {
 public:
  using State = pnrd::PnrdState;

  explicit ReferenceEngine(lang::ModelPtr model) : net_(std::move(model)) {}

  const pnrd::PnrdNet& net() const { return net_; }
  const lang::Model& model() const { return net_.model(); }
  State initial() const { return net_.initial_state(); }
  std::vector<Mode> modes(const State& s) const { return pnrd::enabled_modes(net_, s); }
  State fire(const State& s, const Mode& mode) const { return pnrd::fire(net_, s, mode.transition, mode.binding); }
  std::string key(const State& s) const { return s.key(net_.model()); }
  std::string transition_name(const Mode& mode) const { return model().transitions.at(mode.transition).name; }
  std::vector<std::pair<std::string, std::string>> binding(const Mode& mode) const {
    return binding_fields(mode.binding);
  }
  std::string model_text() const;

 private:
  pnrd::PnrdNet net_;
};

}  // namespace learnflow
