#include "learnflow/engine.hpp"

#include <algorithm>
#include <cstdio>

#include "learnflow/lang/parser.hpp"

namespace learnflow {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::pair<std::string, std::string>> binding_fields(const lang::Binding& b) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [var, v] : b.values()) out.emplace_back(var, v.to_string());
  return out;
}

std::vector<Mode> ClassicalEngine::modes(const State& m) const {
  std::vector<Mode> out;
  for (TransitionIndex t : pn_enabled_set(net_.net, m)) out.push_back({t, {}});
  std::sort(out.begin(), out.end(), [&](const Mode& a, const Mode& b) {
    return net_.net.transition_id(a.transition) < net_.net.transition_id(b.transition);
  });
  return out;
}

std::string ClassicalEngine::model_text() const {
  return net_to_json(net_).dump() + "|m0=" + net_.initial.key(net_.net);
}

std::string ColoredEngine::model_text() const { return lang::print_model(model().ast); }

std::string ReferenceEngine::model_text() const { return lang::print_model(model().ast); }

}  // namespace learnflow
