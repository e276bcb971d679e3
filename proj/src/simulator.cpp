#include "learnflow/simulator.hpp"

#include <set>
#include <stdexcept>

namespace learnflow::sim {

using nlohmann::json;

const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::Deadlock: return "deadlock";
    case Terminal::StepLimit: return "step-limit";
    case Terminal::ScriptedEnd: return "scripted-end";
  }
  return "?";
}

Terminal terminal_from_string(const std::string& s) {
  if (s == "deadlock") return Terminal::Deadlock;
  if (s == "step-limit") return Terminal::StepLimit;
  if (s == "scripted-end") return Terminal::ScriptedEnd;
  throw std::invalid_argument("unknown trace terminal '" + s + "'");
}

// Hashes are written as hex strings: JSON readers in other languages lose
// precision on 64-bit integers.
json to_json(const Trace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json binding = json::object();
    for (const auto& [var, val] : s.binding) binding[var] = val;
    steps.push_back({{"index", s.index},
                     {"transition", s.transition},
                     {"binding", binding},
                     {"pre", hex64(s.pre)},
                     {"post", hex64(s.post)}});
  }
  json j{{"model", t.model}, {"steps", steps}, {"terminal", to_string(t.terminal)}};
  j["seed"] = t.seed ? json(*t.seed) : json(nullptr);
  return j;
}

namespace {
std::uint64_t parse_hash(const json& j) {
  std::string s = j.get<std::string>();
  if (s.size() != 16) throw std::invalid_argument("state hash must have 16 hex digits: " + s);
  return std::stoull(s, nullptr, 16);
}
}  // namespace

Trace trace_from_json(const json& j) {
  Trace t;
  t.model = j.at("model").get<std::string>();
  if (j.contains("seed") && !j.at("seed").is_null()) t.seed = j.at("seed").get<std::uint64_t>();
  t.terminal = terminal_from_string(j.at("terminal").get<std::string>());
  for (const auto& s : j.at("steps")) {
    TraceStep st;
    st.index = s.at("index").get<std::size_t>();
    st.transition = s.at("transition").get<std::string>();
    for (const auto& [var, val] : s.at("binding").items()) st.binding.emplace_back(var, val.get<std::string>());
    st.pre = parse_hash(s.at("pre"));
    st.post = parse_hash(s.at("post"));
    t.steps.push_back(std::move(st));
  }
  return t;
}

std::string dump_traces(const std::vector<Trace>& traces) {
  json arr = json::array();
  for (const auto& t : traces) arr.push_back(to_json(t));
  return json{{"traces", arr}}.dump(2) + "\n";
}

std::vector<Trace> parse_traces(const std::string& text) {
  json j = json::parse(text);
  std::vector<Trace> out;
  if (j.is_object() && j.contains("traces")) {
    for (const auto& t : j.at("traces")) out.push_back(trace_from_json(t));
  } else {
    out.push_back(trace_from_json(j));
  }
  return out;
}

namespace {
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
}  // namespace

void write_csv(std::ostream& out, const std::vector<Trace>& traces) {
  std::set<std::string> vars;
  for (const auto& t : traces)
    for (const auto& s : t.steps)
      for (const auto& [var, _] : s.binding) vars.insert(var);
  out << "trace_id,step,timestamp,transition";
  for (const auto& v : vars) out << ',' << csv_field(v);
  out << '\n';
  for (std::size_t id = 0; id < traces.size(); ++id) {
    for (const auto& s : traces[id].steps) {
      out << id << ',' << s.index << ',' << s.index << ',' << csv_field(s.transition);
      for (const auto& v : vars) {
        out << ',';
        for (const auto& [var, val] : s.binding)
          if (var == v) out << csv_field(val);
      }
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed to write event log");
}

}  // namespace learnflow::sim
