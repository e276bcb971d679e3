#include <doctest.h>

#include <algorithm>

#include "learnflow/corpus.hpp"
#include "learnflow/engine.hpp"
#include "learnflow/simulator.hpp"

using namespace learnflow;

TEST_CASE("corpus ids resolve to model files") {
  CHECK(corpus::ids() == std::vector<std::string>{"fig1", "fig2", "fig3", "fig4", "fig4-six"});
  for (const auto& id : corpus::ids()) {
    CAPTURE(id);
    CHECK(std::filesystem::exists(corpus::model_path(id)));
    CHECK_NOTHROW(corpus::load(id));
  }
  CHECK_FALSE(corpus::is_id("fig5"));
  CHECK_THROWS_AS(corpus::load("fig5"), std::invalid_argument);
}

TEST_CASE("every scenario replays to its expected state") {
  auto all = corpus::scenarios();
  REQUIRE(all.size() >= 8);
  for (const auto& sc : all) {
    CAPTURE(sc.name);
    auto model = corpus::load(sc.model);
    ReferenceEngine engine(model);
    auto trace = sim::run_script(engine, engine.initial(), corpus::resolve(*model, sc.steps));
    REQUIRE(trace.steps.size() == sc.steps.size());

    auto s = engine.initial();
    for (const auto& m : corpus::resolve(*model, sc.steps)) s = engine.fire(s, m);
    for (const auto& [place, literals] : sc.expect_places) {
      CAPTURE(place);
      auto p = model->place(place);
      lang::TokenBag want;
      for (const auto& lit : literals) want.add(lang::parse_value(*model, lit, model->places[p].type));
      CHECK(s.marking.tokens[p] == want);
    }
    for (const auto& [ptr, literal] : sc.expect_store) {
      CAPTURE(ptr);
      CHECK(s.store.at(ptr) == lang::parse_value(*model, literal, model->pointer_types.at(ptr)));
    }
    CHECK(pnrd::dangling_pointers(s).empty());
  }
}

TEST_CASE("fig4 with six students forms two teams and completes both projects") {
  auto sc = corpus::scenario("fig4-six-complete-projects");
  auto model = corpus::load("fig4-six");
  ReferenceEngine engine(model);
  auto s = engine.initial();
  for (const auto& m : corpus::resolve(*model, sc.steps)) s = engine.fire(s, m);
  CHECK(s.marking.tokens[model->place("completed projects")].size() == 2);
  for (const auto& ptr : s.store.pointers()) {
    CAPTURE(ptr);
    CHECK(s.store.at(ptr).field("projects").items().size() == 1);
  }
}

TEST_CASE("scenario files are validated") {
  auto bad = nlohmann::json::parse(R"({"name": "x", "model": "fig1", "steps": [{"binding": {}}]})");
  CHECK_THROWS(corpus::scenario_from_json(bad));
  CHECK_THROWS(corpus::scenario("no-such-scenario"));

  auto model = corpus::load("fig3");
  corpus::ScriptStep unknown{"choose course", {{"zz", "1"}}};
  CHECK_THROWS(corpus::resolve(*model, unknown));
  corpus::ScriptStep ill_typed{"choose course", {{"id", "\"one\""}}};
  CHECK_THROWS(corpus::resolve(*model, ill_typed));
}
