#include "learnflow/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "learnflow/lang/eval.hpp"

#ifndef LEARNFLOW_MODELS_DIR
#define LEARNFLOW_MODELS_DIR "models"
#endif

namespace learnflow::corpus {

namespace fs = std::filesystem;

fs::path models_dir() {
  if (const char* env = std::getenv("LEARNFLOW_MODELS"); env && *env) return env;
  return LEARNFLOW_MODELS_DIR;
}

std::vector<std::string> ids() { return {"fig1", "fig2", "fig3", "fig4", "fig4-six"}; }

bool is_id(const std::string& id) {
  auto all = ids();
  return std::find(all.begin(), all.end(), id) != all.end();
}

fs::path model_path(const std::string& id) {
  if (!is_id(id)) throw std::invalid_argument("unknown corpus model '" + id + "'");
  return models_dir() / "paper" / (id + ".lfn");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

lang::ModelPtr load(const std::string& id) { return lang::load_model(read_file(model_path(id))); }

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.at("name").get<std::string>();
  s.model = j.at("model").get<std::string>();
  for (const auto& st : j.at("steps")) {
    ScriptStep step;
    step.transition = st.at("transition").get<std::string>();
    if (st.contains("binding"))
      for (const auto& [k, v] : st.at("binding").items()) step.binding[k] = v.get<std::string>();
    s.steps.push_back(std::move(step));
  }
  if (j.contains("expect")) {
    const auto& e = j.at("expect");
    if (e.contains("places"))
      for (const auto& [place, toks] : e.at("places").items())
        s.expect_places[place] = toks.get<std::vector<std::string>>();
    if (e.contains("store"))
      for (const auto& [ptr, v] : e.at("store").items()) s.expect_store[ptr] = v.get<std::string>();
  }
  return s;
}

std::vector<Scenario> scenarios() {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(models_dir() / "scenarios"))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) {
    try {
      out.push_back(scenario_from_json(nlohmann::json::parse(read_file(f))));
    } catch (const std::exception& e) {
      throw std::runtime_error(f.filename().string() + ": " + e.what());
    }
  }
  return out;
}

Scenario scenario(const std::string& name) {
  for (auto& s : scenarios())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

Mode resolve(const lang::Model& model, const ScriptStep& step) {
  Mode m;
  m.transition = model.transition(step.transition);
  for (const auto& [var, text] : step.binding) {
    auto it = model.variables.find(var);
    if (it == model.variables.end()) throw std::invalid_argument("unknown variable '" + var + "'");
    m.binding.bind(var, lang::parse_value(model, text, it->second));
  }
  return m;
}

std::vector<Mode> resolve(const lang::Model& model, const std::vector<ScriptStep>& steps) {
  std::vector<Mode> out;
  for (const auto& s : steps) out.push_back(resolve(model, s));
  return out;
}

}  // namespace learnflow::corpus
