#include <doctest.h>

#include <algorithm>
#include <random>

#include "learnflow/corpus.hpp"
#include "learnflow/net_io.hpp"
#include "learnflow/petri_net.hpp"
#include "support/random_models.hpp"

using namespace learnflow;

namespace {

ClassicalNet fig1() { return classical_from_model(*corpus::load("fig1")); }

PlainMarking fig1_marking(const PetriNet& net) {
  // two in the pool, one about to start, two on the course, one at the exam
  return PlainMarking::from_ids(net, {{"student pool", 2}, {"enrolled", 1}, {"on course", 2}, {"on exam", 1}});
}

PetriNet chain() {
  PetriNet n;
  n.add_place("i");
  n.add_place("f");
  n.add_transition("t");
  n.add_input("i", "t");
  n.add_output("t", "f");
  return n;
}

}  // namespace

TEST_CASE("enablement on the fig1 marking") {
  auto c = fig1();
  auto m = fig1_marking(c.net);
  CHECK(pn_enabled(c.net, m, "start a course"));
  CHECK_FALSE(pn_enabled(c.net, PlainMarking(c.net.place_count()), "start a course"));

  PetriNet n;
  n.add_place("p");
  n.add_transition("gen");
  n.add_output("gen", "p");
  CHECK(pn_enabled(n, PlainMarking(1), "gen"));
  CHECK_THROWS(pn_enabled(n, PlainMarking(1), "nope"));
}

TEST_CASE("firing on the fig1 marking") {
  auto c = fig1();
  auto m2 = pn_fire(c.net, fig1_marking(c.net), "start a course");
  CHECK(m2 == PlainMarking::from_ids(c.net, {{"student pool", 2}, {"on course", 3}, {"on exam", 1}}));
  CHECK_THROWS_AS(pn_fire(c.net, m2, "start a course"), std::logic_error);
}

TEST_CASE("self loops and pure producers") {
  PetriNet n;
  n.add_place("p");
  n.add_place("q");
  n.add_transition("loop");
  n.add_input("p", "loop");
  n.add_output("loop", "p");
  n.add_transition("gen");
  n.add_output("gen", "q", 3);
  PlainMarking m = PlainMarking::from_ids(n, {{"p", 1}});
  CHECK(pn_fire(n, m, "loop") == m);
  CHECK(pn_fire(n, m, "gen")[n.place("q")] == 3);
}

TEST_CASE("enabled set on the fig1 marking") {
  auto c = fig1();
  std::vector<std::string> names;
  for (auto t : pn_enabled_set(c.net, fig1_marking(c.net))) names.push_back(c.net.transition_id(t));
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"fail exam", "pass exam", "select course", "start a course", "take exam"});

  PetriNet n = chain();
  CHECK(pn_enabled_set(n, PlainMarking(2)).empty());
  CHECK(pn_enabled_set(n, PlainMarking::from_ids(n, {{"i", 1}})).size() == 1);
}

TEST_CASE("enablement agrees with preset inclusion") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto raw = testsupport::random_net(rng);
    auto net = testsupport::to_petri(raw);
    auto m = testsupport::initial_marking(raw);
    for (TransitionIndex t = 0; t < net.transition_count(); ++t)
      REQUIRE(pn_enabled(net, m, t) == ms_leq(preset_multiset(net, t), m.as_multiset(net)));
  }
}

TEST_CASE("firing conserves flow and reverse firing restores the marking") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    auto raw = testsupport::random_net(rng);
    auto net = testsupport::to_petri(raw);
    auto rev = net.reversed();
    auto m = testsupport::initial_marking(raw);
    for (TransitionIndex t : pn_enabled_set(net, m)) {
      auto m2 = pn_fire(net, m, t);
      for (PlaceIndex p = 0; p < net.place_count(); ++p)
        REQUIRE(static_cast<long long>(m2[p]) - static_cast<long long>(m[p]) ==
                static_cast<long long>(net.output_weight(t, p)) - static_cast<long long>(net.input_weight(p, t)));
      REQUIRE(pn_enabled(rev, m2, t));
      REQUIRE(pn_fire(rev, m2, t) == m);
    }
  }
}

TEST_CASE("workflow structure") {
  auto c = fig1();
  CHECK(c.source == "student pool");
  CHECK(c.sink == "portfolio record");
  CHECK(wf_validate(c.net, "student pool", "portfolio record").empty());

  PetriNet isolated = chain();
  isolated.add_place("lonely");
  auto r = wf_validate(isolated, "i", "f");
  REQUIRE(!r.empty());
  CHECK(std::any_of(r.begin(), r.end(), [](const WfViolation& v) { return v.node == "lonely"; }));

  PetriNet back = chain();
  back.add_transition("again");
  back.add_input("f", "again");
  back.add_output("again", "i");
  auto r2 = wf_validate(back, "i", "f");
  CHECK(std::any_of(r2.begin(), r2.end(), [](const WfViolation& v) { return v.kind == WfViolation::Kind::SourceHasInput; }));
  CHECK(std::any_of(r2.begin(), r2.end(), [](const WfViolation& v) { return v.kind == WfViolation::Kind::SinkHasOutput; }));

  CHECK_THROWS(wf_validate(back, "i", "missing"));
}

TEST_CASE("exploration") {
  PetriNet n = chain();
  auto g = explore(n, PlainMarking::from_ids(n, {{"i", 1}}));
  CHECK(g.size() == 2);
  CHECK(g.edges.size() == 1);
  CHECK_FALSE(g.truncated);

  PetriNet gen;
  gen.add_place("p");
  gen.add_transition("t");
  gen.add_output("t", "p");
  auto g2 = explore(gen, PlainMarking(1), {10});
  CHECK(g2.truncated);
  CHECK(g2.size() == 10);
  CHECK_THROWS(explore(gen, PlainMarking(1), {0}));

  auto c = fig1();
  auto g3 = explore(c.net, c.initial);
  CHECK(g3.size() == 6);
  CHECK_FALSE(g3.truncated);
}

TEST_CASE("fig1 graph matches the brute-force enumerator") {
  auto c = fig1();
  testsupport::RawNet raw;
  raw.places = c.net.place_count();
  raw.transitions = c.net.transition_count();
  raw.pre.assign(raw.transitions, std::vector<Count>(raw.places));
  raw.post = raw.pre;
  for (TransitionIndex t = 0; t < raw.transitions; ++t)
    for (PlaceIndex p = 0; p < raw.places; ++p) {
      raw.pre[t][p] = c.net.input_weight(p, t);
      raw.post[t][p] = c.net.output_weight(t, p);
    }
  raw.m0.assign(raw.places, 0);
  raw.m0[c.net.place("student pool")] = 1;
  auto g = explore(c.net, c.initial);
  auto projected = testsupport::project(
      g,
      [&](const PlainMarking& m) {
        testsupport::RawState s(raw.places);
        for (PlaceIndex p = 0; p < raw.places; ++p) s[p] = m[p];
        return s;
      },
      [&](const std::string& label) { return c.net.transition(label); });
  auto oracle = testsupport::brute_force(raw, 50);
  CHECK(projected.states == oracle.states);
  CHECK(projected.edges == oracle.edges);
}

TEST_CASE("exploration order is reproducible") {
  std::mt19937_64 rng(3);
  auto raw = testsupport::random_net(rng);
  auto net = testsupport::to_petri(raw);
  auto a = explore(net, testsupport::initial_marking(raw), {500, 6});
  auto b = explore(net, testsupport::initial_marking(raw), {500, 6});
  CHECK(a.keys == b.keys);
  REQUIRE(a.edges.size() == b.edges.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i) CHECK(a.edges[i].label == b.edges[i].label);
}

TEST_CASE("soundness") {
  auto c = fig1();
  auto v = wf_soundness({c.net, "student pool", "portfolio record"});
  CHECK(v.status == SoundnessVerdict::Status::Sound);

  // a transition that takes the final token and puts it elsewhere
  PetriNet leak = chain();
  leak.add_place("x");
  leak.add_transition("split");
  leak.add_input("i", "split");
  leak.add_output("split", "f");
  leak.add_output("split", "x");
  leak.add_transition("drain");
  leak.add_input("x", "drain");
  leak.add_output("drain", "f");
  auto v2 = wf_soundness({leak, "i", "f"});
  CHECK(v2.status == SoundnessVerdict::Status::Unsound);

  // a transition that can never fire
  PetriNet dead = chain();
  dead.add_place("never");
  dead.add_transition("stuck");
  dead.add_input("i", "stuck");
  dead.add_input("never", "stuck");
  dead.add_output("stuck", "never");
  dead.add_output("stuck", "f");
  auto v3 = wf_soundness({dead, "i", "f"});
  CHECK(v3.status == SoundnessVerdict::Status::Unsound);
  CHECK(std::any_of(v3.reasons.begin(), v3.reasons.end(),
                    [](const std::string& r) { return r.find("stuck") != std::string::npos; }));

  PetriNet bad = chain();
  bad.add_place("lonely");
  CHECK(wf_soundness({bad, "i", "f"}).status == SoundnessVerdict::Status::Unsound);
}

TEST_CASE("JSON structural nets") {
  auto j = nlohmann::json::parse(R"({
    "places": [{"id": "i", "tokens": 1}, {"id": "f"}],
    "transitions": [{"id": "t", "label": "do it"}],
    "arcs": [{"from": "i", "to": "t"}, {"from": "t", "to": "f", "weight": 2}]
  })");
  auto n = net_from_json(j);
  CHECK(n.source == "i");
  CHECK(n.sink == "f");
  CHECK(n.initial[n.net.place("i")] == 1);
  CHECK(n.net.output_weight(0, n.net.place("f")) == 2);
  CHECK(n.net.transition_label(0) == "do it");
  auto back = net_from_json(net_to_json(n));
  CHECK(net_to_json(back) == net_to_json(n));

  CHECK_THROWS(net_from_json(nlohmann::json::parse(R"({"places":[{"id":"a"}],"arcs":[{"from":"a","to":"a"}]})")));
  CHECK_THROWS(net_from_json(nlohmann::json::parse(R"({"places":[{"id":"a"}],"transitions":[{"id":"a"}]})")));
}
