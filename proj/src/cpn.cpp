#include "learnflow/cpn.hpp"

#include <algorithm>
#include <stdexcept>

namespace learnflow::cpn {

namespace {
const lang::GlobalStore& no_store() {
  static const lang::GlobalStore empty;
  return empty;
}

void sort_bindings(std::vector<Binding>& bs) {
  std::stable_sort(bs.begin(), bs.end(),
                   [](const Binding& a, const Binding& b) { return a.to_string() < b.to_string(); });
}
}  // namespace

ColoredNet::ColoredNet(lang::ModelPtr model) : model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("null model");
  if (!model_->is_colored_only())
    throw std::invalid_argument("model uses pointers or operators; load it as a reference net");
}

ColoredMarking ColoredNet::initial_marking() const {
  ColoredMarking m;
  for (const auto& p : model_->places) m.tokens.push_back(p.initial);
  return m;
}

std::vector<Binding> enumerate_bindings(const ColoredNet& net, const ColoredMarking& m, std::size_t t) {
  auto bs = detail::search_bindings(net.model(), m.tokens, no_store(), t);
  sort_bindings(bs);
  return bs;
}

bool enabled(const ColoredNet& net, const ColoredMarking& m, std::size_t t, const Binding& b) {
  detail::require_complete(net.model(), t, b);
  return detail::mode_enabled(net.model(), m.tokens, no_store(), t, b);
}

ColoredMarking fire(const ColoredNet& net, const ColoredMarking& m, std::size_t t, const Binding& b) {
  const auto& model = net.model();
  if (!enabled(net, m, t, b))
    throw std::logic_error("transition '" + model.transitions[t].name + "' is not enabled under " + b.to_string());
  const auto& tr = model.transitions[t];
  ColoredMarking next = m;
  for (const auto& arc : tr.inputs)
    next.tokens[arc.place] -= lang::eval_inscription(arc.inscription, b, no_store());
  for (const auto& arc : tr.outputs) {
    auto produced = lang::eval_inscription(arc.inscription, b, no_store());
    for (const auto& [v, _] : produced)
      if (!lang::conforms(v, model.places[arc.place].type))
        throw lang::EvalError("token " + v.to_string() + " does not fit place '" + model.places[arc.place].name + "'");
    next.tokens[arc.place] += produced;
  }
  return next;
}

std::vector<Mode> enabled_modes(const ColoredNet& net, const ColoredMarking& m) {
  const auto& model = net.model();
  std::vector<std::size_t> order(model.transitions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return model.transitions[a].name < model.transitions[b].name; });
  std::vector<Mode> modes;
  for (std::size_t t : order)
    for (auto& b : enumerate_bindings(net, m, t)) modes.push_back({t, std::move(b)});
  return modes;
}

bool well_typed(const lang::Model& model, const ColoredMarking& m) {
  if (m.tokens.size() != model.places.size()) return false;
  for (std::size_t p = 0; p < m.tokens.size(); ++p)
    for (const auto& [v, _] : m.tokens[p])
      if (!lang::conforms(v, model.places[p].type)) return false;
  return true;
}

ColoredGraph explore(const ColoredNet& net, const ColoredMarking& m0, const ExploreBounds& bounds) {
  if (bounds.max_states == 0 || bounds.max_depth == 0)
    throw std::invalid_argument("exploration bounds must be positive");
  const auto& model = net.model();
  auto successors = [&](const ColoredMarking& m) {
    std::vector<std::pair<std::string, ColoredMarking>> out;
    for (const auto& mode : enabled_modes(net, m))
      out.emplace_back(mode.label(model), fire(net, m, mode.transition, mode.binding));
    return out;
  };
  auto key = [&](const ColoredMarking& m) { return m.key(model); };
  return explore_bfs(m0, successors, key, bounds);
}

}  // namespace learnflow::cpn
