#include "learnflow/pnrd.hpp"

#include <algorithm>
#include <stdexcept>

namespace learnflow::pnrd {

PnrdNet::PnrdNet(lang::ModelPtr model) : model_(std::move(model)) {
  if (!model_) throw std::invalid_argument("null model");
}

PnrdState PnrdNet::initial_state() const {
  PnrdState s;
  for (const auto& p : model_->places) s.marking.tokens.push_back(p.initial);
  s.store = lang::initial_store(*model_);
  return s;
}

std::vector<Binding> enumerate_bindings(const PnrdNet& net, const PnrdState& s, std::size_t t) {
  auto bs = detail::search_bindings(net.model(), s.marking.tokens, s.store, t);
  std::stable_sort(bs.begin(), bs.end(), [](const Binding& a, const Binding& b) { return a.to_string() < b.to_string(); });
  return bs;
}

bool enabled(const PnrdNet& net, const PnrdState& s, std::size_t t, const Binding& b) {
  detail::require_complete(net.model(), t, b);
  return detail::mode_enabled(net.model(), s.marking.tokens, s.store, t, b);
}

PnrdState fire(const PnrdNet& net, const PnrdState& s, std::size_t t, const Binding& b) {
  const auto& model = net.model();
  if (!enabled(net, s, t, b))
    throw std::logic_error("transition '" + model.transitions[t].name + "' is not enabled under " + b.to_string());
  const auto& tr = model.transitions[t];

  PnrdState next;
  next.marking = s.marking;
  for (const auto& arc : tr.inputs)
    next.marking.tokens[arc.place] -= lang::eval_inscription(arc.inscription, b, s.store);

  lang::Transformed after = lang::apply_operator(tr.op, b, s.store, model);
  next.store = std::move(after.store);

  for (const auto& arc : tr.outputs) {
    auto produced = lang::eval_inscription(arc.inscription, after.binding, next.store);
    for (const auto& [v, _] : produced) {
      if (!lang::conforms(v, model.places[arc.place].type))
        throw lang::EvalError("token " + v.to_string() + " does not fit place '" + model.places[arc.place].name + "'");
      std::vector<std::string> ptrs;
      lang::collect_pointers(v, ptrs);
      for (const auto& p : ptrs)
        if (!next.store.allocated(p))
          throw lang::EvalError("dangling pointer '" + p + "' in token produced by '" + tr.name + "'");
    }
    next.marking.tokens[arc.place] += produced;
  }
  return next;
}

std::vector<Mode> enabled_modes(const PnrdNet& net, const PnrdState& s) {
  const auto& model = net.model();
  std::vector<std::size_t> order(model.transitions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return model.transitions[a].name < model.transitions[b].name; });
  std::vector<Mode> modes;
  for (std::size_t t : order)
    for (auto& b : enumerate_bindings(net, s, t)) modes.push_back({t, std::move(b)});
  return modes;
}

std::vector<std::string> dangling_pointers(const PnrdState& s) {
  std::vector<std::string> out;
  for (const auto& bag : s.marking.tokens) {
    for (const auto& [v, _] : bag) {
      std::vector<std::string> ptrs;
      lang::collect_pointers(v, ptrs);
      for (auto& p : ptrs)
        if (!s.store.allocated(p)) out.push_back(std::move(p));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

Policy Policy::seeded(std::uint64_t seed) {
  Policy p;
  p.rng_.seed(seed);
  return p;
}

Policy Policy::scripted(std::vector<Mode> script) {
  Policy p;
  p.scripted_ = true;
  p.script_ = std::move(script);
  return p;
}

std::optional<std::size_t> Policy::choose(const lang::Model& model, const std::vector<Mode>& modes, std::size_t step) {
  if (!scripted_) {
    if (modes.empty()) return std::nullopt;
    return uniform_index(rng_, modes.size());
  }
  if (step >= script_.size()) return std::nullopt;
  const Mode& want = script_[step];
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i] == want) return i;
  throw std::runtime_error("scripted mode " + want.label(model) + " is not enabled at step " + std::to_string(step));
}

std::vector<RunStep> run(const PnrdNet& net, const PnrdState& initial, Policy policy, std::size_t max_steps) {
  std::vector<RunStep> steps;
  PnrdState cur = initial;
  for (std::size_t k = 0; k < max_steps; ++k) {
    auto modes = enabled_modes(net, cur);
    if (modes.empty() && !policy.is_scripted()) break;
    if (policy.is_scripted() && k >= policy.script_length()) break;
    auto pick = policy.choose(net.model(), modes, k);
    if (!pick) break;
    const Mode& m = modes[*pick];
    cur = fire(net, cur, m.transition, m.binding);
    steps.push_back({m, cur});
  }
  return steps;
}

PnrdGraph explore(const PnrdNet& net, const PnrdState& initial, const ExploreBounds& bounds) {
  if (bounds.max_states == 0 || bounds.max_depth == 0)
    throw std::invalid_argument("exploration bounds must be positive");
  const auto& model = net.model();
  auto successors = [&](const PnrdState& s) {
    std::vector<std::pair<std::string, PnrdState>> out;
    for (const auto& mode : enabled_modes(net, s))
      out.emplace_back(mode.label(model), fire(net, s, mode.transition, mode.binding));
    return out;
  };
  auto key = [&](const PnrdState& s) { return s.key(model); };
  return explore_bfs(initial, successors, key, bounds);
}

}  // namespace learnflow::pnrd
