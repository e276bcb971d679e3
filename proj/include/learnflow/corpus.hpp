#pragma once

// The corpus models shipped under models/paper and their scenario scripts.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "learnflow/lang/model.hpp"
#include "learnflow/mode.hpp"

namespace learnflow::corpus {

/// $LEARNFLOW_MODELS if set, else the models directory of the source tree.
std::filesystem::path models_dir();

/// fig1, fig2, fig3, fig4, fig4-six.
std::vector<std::string> ids();
bool is_id(const std::string& id);
std::filesystem::path model_path(const std::string& id);
/// Throws std::invalid_argument for an unknown id.
lang::ModelPtr load(const std::string& id);

std::string read_file(const std::filesystem::path& path);

struct ScriptStep {
  std::string transition;
  std::map<std::string, std::string> binding;  // variable -> value literal
};

struct Scenario {
  std::string name;
  std::string model;  // corpus id
  std::vector<ScriptStep> steps;
  // Expected final tokens per listed place and store cells, as literals.
  std::map<std::string, std::vector<std::string>> expect_places;
  std::map<std::string, std::string> expect_store;
};

Scenario scenario_from_json(const nlohmann::json& j);
/// All scenarios in models/scenarios, ordered by file name.
std::vector<Scenario> scenarios();
Scenario scenario(const std::string& name);

/// Resolves literal bindings against the model's variable types.
Mode resolve(const lang::Model& model, const ScriptStep& step);
std::vector<Mode> resolve(const lang::Model& model, const std::vector<ScriptStep>& steps);

}  // namespace learnflow::corpus
