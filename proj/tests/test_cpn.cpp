#include <doctest.h>

#include <random>

#include "learnflow/corpus.hpp"
#include "learnflow/cpn.hpp"
#include "learnflow/lang/parser.hpp"
#include "support/random_models.hpp"

using namespace learnflow;
using namespace learnflow::lang;
using cpn::ColoredNet;

namespace {

Value student(std::int64_t id, std::vector<std::int64_t> done) {
  std::vector<Value> r;
  for (auto c : done) r.push_back(Value::integer(c));
  return Value::tuple({Value::integer(id), Value::list(std::move(r))});
}

std::vector<std::string> labels(const ColoredNet& net, const std::vector<Mode>& modes) {
  std::vector<std::string> out;
  for (const auto& m : modes) out.push_back(m.label(net.model()));
  return out;
}

}  // namespace

TEST_CASE("fig2: both pool students can select a course") {
  ColoredNet net(corpus::load("fig2"));
  auto m = net.initial_marking();
  auto t = net.transition("select course");
  auto bs = cpn::enumerate_bindings(net, m, t);
  REQUIRE(bs.size() == 2);
  CHECK(bs[0].to_string() == "{id=1, r=[1,2]}");
  CHECK(bs[1].to_string() == "{id=34, r=[]}");

  auto after = cpn::fire(net, m, t, bs[1]);
  auto sel = net.model().place("course selected");
  auto pool = net.model().place("student pool");
  CHECK(after.tokens[sel].count(student(34, {})) == 1);
  CHECK(after.tokens[pool].count(student(34, {})) == 0);
  CHECK(after.tokens[pool].count(student(1, {1, 2})) == 1);
  CHECK(cpn::well_typed(net.model(), after));
}

TEST_CASE("fig2: prerequisites gate registration") {
  ColoredNet net(corpus::load("fig2"));
  auto m = net.initial_marking();
  auto sel = net.transition("select course");
  auto reg = net.transition("register for a course");
  CHECK(cpn::enumerate_bindings(net, m, reg).empty());

  auto s34 = cpn::fire(net, m, sel, cpn::enumerate_bindings(net, m, sel)[1]);
  auto regs = cpn::enumerate_bindings(net, s34, reg);
  REQUIRE(regs.size() == 1);
  CHECK(regs[0].find("c")->as_int() == 23);

  Binding want42{{"id", Value::integer(34)}, {"r", Value::list({})}, {"c", Value::integer(42)},
                 {"pre", Value::set({Value::integer(23)})}};
  CHECK_FALSE(cpn::enabled(net, s34, reg, want42));
  CHECK_THROWS_AS(cpn::fire(net, s34, reg, want42), std::logic_error);
  CHECK_THROWS_AS(cpn::enabled(net, s34, reg, Binding{{"id", Value::integer(34)}}), std::invalid_argument);
}

TEST_CASE("fig2: passing appends the course to the record") {
  ColoredNet net(corpus::load("fig2"));
  auto m = net.initial_marking();
  auto pass = net.transition("pass exam");
  auto bs = cpn::enumerate_bindings(net, m, pass);
  REQUIRE(bs.size() == 1);
  auto after = cpn::fire(net, m, pass, bs[0]);
  CHECK(after.tokens[net.model().place("student pool")].count(student(9, {1, 23})) == 1);
  CHECK(after.tokens[net.model().place("on exam")].empty());
}

TEST_CASE("fig2: initial modes in canonical order") {
  ColoredNet net(corpus::load("fig2"));
  CHECK(labels(net, cpn::enabled_modes(net, net.initial_marking())) ==
        std::vector<std::string>{"fail exam{c=23, id=9, r=[1]}", "pass exam{c=23, id=9, r=[1]}",
                                 "select course{id=1, r=[1,2]}", "select course{id=34, r=[]}",
                                 "start a course{c=42, id=5, r=[23]}", "take exam{c=23, id=7, r=[]}",
                                 "take exam{c=42, id=8, r=[23]}"});
}

TEST_CASE("multiple copies and multi-token inscriptions") {
  auto model = load_model(R"(
vars x, y : Int;
places
  a : Int = 3'1 ++ 1'2;
  b : Int;
transitions
  pair guard x <= y;
  twice;
arcs
  a -> pair : x ++ y;
  pair -> b : x + y;
  a -> twice : 2'x;
  twice -> b : x;
)");
  ColoredNet net(model);
  auto m = net.initial_marking();
  auto pairs = cpn::enumerate_bindings(net, m, net.transition("pair"));
  // x = y = 1 needs two copies of 1; (1,2) works; (2,2) does not
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].to_string() == "{x=1, y=1}");
  CHECK(pairs[1].to_string() == "{x=1, y=2}");
  auto twice = cpn::enumerate_bindings(net, m, net.transition("twice"));
  REQUIRE(twice.size() == 1);
  auto m2 = cpn::fire(net, m, net.transition("twice"), twice[0]);
  CHECK(m2.tokens[0].count(Value::integer(1)) == 1);
  CHECK(m2.tokens[1].count(Value::integer(1)) == 1);
}

TEST_CASE("colored nets reject reference models") {
  CHECK_THROWS_AS(ColoredNet(corpus::load("fig3")), std::invalid_argument);
  CHECK_NOTHROW(ColoredNet(corpus::load("fig1")));
}

TEST_CASE("binding enumeration matches an exhaustive search") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 150; ++i) {
    auto text = testsupport::random_colored_model_text(rng, false);
    CAPTURE(text);
    ColoredNet net(load_model(text));
    auto m = net.initial_marking();
    // a few steps in, so markings vary
    for (int step = 0; step < 4; ++step) {
      for (std::size_t t = 0; t < net.model().transitions.size(); ++t) {
        auto got = cpn::enumerate_bindings(net, m, t);
        auto want = testsupport::exhaustive_bindings(net, m, t);
        REQUIRE(got == want);
      }
      auto modes = cpn::enabled_modes(net, m);
      if (modes.empty()) break;
      const auto& pick = modes[testsupport::pick(rng, 0, modes.size() - 1)];
      m = cpn::fire(net, m, pick.transition, pick.binding);
      REQUIRE(cpn::well_typed(net.model(), m));
    }
  }
}

TEST_CASE("exploration of fig2") {
  ColoredNet net(corpus::load("fig2"));
  auto g = cpn::explore(net, net.initial_marking(), {5000});
  CHECK(g.size() > 1);
  for (const auto& s : g.states) CHECK(cpn::well_typed(net.model(), s));
  CHECK_THROWS(cpn::explore(net, net.initial_marking(), {0}));
}

TEST_CASE("fig2 with only the pool students explores completely") {
  auto text = corpus::read_file(corpus::model_path("fig2"));
  for (std::string cut : {" = 1'(5, [23], 42)", " = 1'(7, [], 23) ++ 1'(8, [23], 42)", " = 1'(9, [1], 23)"}) {
    auto at = text.find(cut);
    REQUIRE(at != std::string::npos);
    text.erase(at, cut.size());
  }
  ColoredNet net(load_model(text));
  auto g = cpn::explore(net, net.initial_marking());
  CHECK_FALSE(g.truncated);
  // students are conserved; a run only stops with every student in the pool
  // or stuck after selecting when no course is left to register for
  const auto& model = net.model();
  std::size_t stopped = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto& tk = g.states[n].tokens;
    std::size_t students = 0;
    for (const char* p : {"student pool", "course selected", "enrolled", "on course", "on exam"})
      students += tk[model.place(p)].size();
    REQUIRE(students == 2);
    if (!g.expanded[n] || g.out_degree[n] != 0) continue;
    ++stopped;
    CHECK(tk[model.place("student pool")].size() + tk[model.place("course selected")].size() == 2);
  }
  CHECK(stopped > 0);
}
