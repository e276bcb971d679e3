// Acceptance checks. Prints one PASS/FAIL line per check and exits nonzero if
// any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "learnflow/analysis.hpp"
#include "learnflow/corpus.hpp"
#include "learnflow/cpn.hpp"
#include "learnflow/engine.hpp"
#include "learnflow/net_io.hpp"
#include "learnflow/simulator.hpp"
#include "support/random_models.hpp"

using namespace learnflow;
using namespace learnflow::lang;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few failure messages of a check.
struct Failures {
  std::size_t count = 0;
  std::ostringstream first;
  void add(const std::string& what) {
    if (count++ < 3) first << (count > 1 ? "; " : "") << what;
  }
  Outcome outcome(const std::string& summary) const {
    if (count == 0) return {true, summary};
    return {false, std::to_string(count) + " failure(s): " + first.str()};
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream o;
  o.precision(2);
  o << std::fixed << s << " s";
  return o.str();
}

// ------------------------------------------------------------------ multisets

using MS = Multiset<int>;

MS random_ms(std::mt19937_64& rng) {
  MS m;
  std::uniform_int_distribution<int> elem(0, 5), count(0, 4), len(0, 6);
  for (int i = len(rng); i > 0; --i)
    if (int n = count(rng)) m.add(elem(rng), n);
  return m;
}

Outcome multiset_laws() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  Failures f;
  const int cases = 10000;
  for (int i = 0; i < cases; ++i) {
    MS a = random_ms(rng), b = random_ms(rng), c = random_ms(rng);
    if (!(ms_sum(a, MS{}) == a && ms_sum(MS{}, a) == a)) f.add("sum identity");
    if (!(ms_sum(a, b) == ms_sum(b, a))) f.add("sum commutativity");
    if (!(ms_sum(ms_sum(a, b), c) == ms_sum(a, ms_sum(b, c)))) f.add("sum associativity");
    // (a + b) - b = a, and a - b is the least x with a <= x + b
    if (!(ms_subtract(ms_sum(a, b), b) == a)) f.add("subtraction cancels a sum");
    if (!ms_leq(a, ms_sum(ms_subtract(a, b), b))) f.add("subtraction lower bound");
    // pointwise max(0, a - b) by hand
    for (int e = 0; e <= 5; ++e) {
      Count want = a.count(e) > b.count(e) ? a.count(e) - b.count(e) : 0;
      if (ms_subtract(a, b).count(e) != want) f.add("truncated subtraction");
    }
    // subtracting more leaves less
    MS big = ms_sum(b, c);
    if (!ms_leq(ms_subtract(a, big), ms_subtract(a, b))) f.add("subtraction antitone in its right argument");
    if (!ms_leq(b, big)) f.add("inclusion of a sum");
  }
  double secs = seconds_since(t0);
  if (secs >= 10) f.add("took " + fmt_seconds(secs));
  return f.outcome(std::to_string(cases) + " cases in " + fmt_seconds(secs));
}

// ----------------------------------------------------------- classical oracle

constexpr std::size_t kDepth = 12;

std::string canonical_hash(const testsupport::RawGraph& g) {
  std::ostringstream s;
  for (const auto& st : g.states) {
    for (auto c : st) s << c << ',';
    s << ';';
  }
  for (const auto& [from, t, to] : g.edges) {
    for (auto c : from) s << c << ',';
    s << '-' << t << '>';
    for (auto c : to) s << c << ',';
    s << ';';
  }
  return hex64(fnv1a(s.str()));
}

testsupport::RawState counts_of(const PlainMarking& m) {
  testsupport::RawState s(m.place_count());
  for (PlaceIndex p = 0; p < m.place_count(); ++p) s[p] = m[p];
  return s;
}

Outcome classical_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2);
  Failures f;
  std::size_t states = 0;
  for (int i = 0; i < 100; ++i) {
    auto raw = testsupport::random_net(rng, 6, 5);
    auto net = testsupport::to_petri(raw);
    auto g = explore(net, testsupport::initial_marking(raw), {1000000, kDepth});
    auto got = testsupport::project(g, counts_of, testsupport::label_transition);
    auto want = testsupport::brute_force(raw, kDepth);
    states += got.states.size();
    if (got.edges.size() != g.edges.size()) f.add("net " + std::to_string(i) + ": duplicate edges");
    if (got.states.size() != g.size()) f.add("net " + std::to_string(i) + ": duplicate states");
    if (canonical_hash(got) != canonical_hash(want) || got.states != want.states || got.edges != want.edges)
      f.add("net " + std::to_string(i) + ": graphs differ");
  }
  double secs = seconds_since(t0);
  if (secs >= 60) f.add("took " + fmt_seconds(secs));
  return f.outcome("100 nets, " + std::to_string(states) + " states within depth " + std::to_string(kDepth) + ", " +
                   fmt_seconds(secs));
}

// ------------------------------------------------------------------- fig1

Outcome fig1_workflow() {
  auto c = classical_from_model(*corpus::load("fig1"));
  Failures f;
  if (!c.source || !c.sink) return {false, "source or sink not inferred"};
  if (!wf_validate(c.net, *c.source, *c.sink).empty()) f.add("not a workflow net");
  auto v = wf_soundness({c.net, *c.source, *c.sink});
  if (v.status != SoundnessVerdict::Status::Sound) f.add(std::string("soundness: ") + to_string(v.status));
  if (c.initial.total() != 1 || c.initial[c.net.place(*c.source)] != 1) f.add("initial marking is not one source token");
  auto g = explore(c.net, c.initial);
  if (g.truncated) f.add("exploration truncated");
  return f.outcome("sound, " + std::to_string(g.size()) + " states, not truncated");
}

// ------------------------------------------------------------------- fig2

Outcome fig2_modes() {
  auto model = corpus::load("fig2");
  cpn::ColoredNet net(model);
  auto m = net.initial_marking();
  Failures f;
  auto select = net.transition("select course");
  auto bs = cpn::enumerate_bindings(net, m, select);
  std::set<std::int64_t> ids;
  for (const auto& b : bs) ids.insert(b.find("id")->as_int());
  if (bs.size() != 2 || ids != std::set<std::int64_t>{1, 34}) f.add("select course modes: " + std::to_string(bs.size()));

  // student 34 has no course 23 yet: course 42 is out of reach
  auto reg = net.transition("register for a course");
  auto course42 = [](const Binding& b) { return b.find("c")->as_int() == 42; };
  Binding pick34;
  for (const auto& b : bs)
    if (b.find("id")->as_int() == 34) pick34 = b;
  auto s = cpn::fire(net, m, select, pick34);
  auto regs = cpn::enumerate_bindings(net, s, reg);
  if (std::any_of(regs.begin(), regs.end(), course42)) f.add("registration for 42 enabled without 23");

  // complete course 23 by script, return to the pool, then register for 42
  auto sc = corpus::scenario("fig2-register-after-23");
  auto script = corpus::resolve(*model, sc.steps);
  if (script.empty() || model->transitions[script.back().transition].name != "register for a course" ||
      !course42(script.back().binding))
    return {false, "scenario does not end with registration for 42"};
  auto cur = m;
  for (std::size_t k = 0; k + 1 < script.size(); ++k) {
    if (!cpn::enabled(net, cur, script[k].transition, script[k].binding)) {
      f.add("scripted step " + std::to_string(k) + " disabled");
      return f.outcome("");
    }
    cur = cpn::fire(net, cur, script[k].transition, script[k].binding);
  }
  regs = cpn::enumerate_bindings(net, cur, reg);
  bool found = std::any_of(regs.begin(), regs.end(), [&](const Binding& b) { return b == script.back().binding; });
  if (!found) f.add("registration for 42 still disabled after completing 23");
  return f.outcome("select course has modes for ids 1 and 34; registration for 42 follows course 23");
}

// -------------------------------------------------------- CPN unit degeneration

Outcome cpn_degeneration() {
  std::mt19937_64 rng(5);
  Failures f;
  for (int i = 0; i < 50; ++i) {
    auto raw = testsupport::random_net(rng, 6, 5);
    auto classical = explore(testsupport::to_petri(raw), testsupport::initial_marking(raw), {1000000, kDepth});
    cpn::ColoredNet net(load_model(testsupport::unit_model_text(raw)));
    auto colored = cpn::explore(net, net.initial_marking(), {1000000, kDepth});
    auto unit_counts = [&](const cpn::ColoredMarking& m) {
      testsupport::RawState s(raw.places);
      for (std::size_t p = 0; p < raw.places; ++p) s[p] = m.tokens[net.model().place(testsupport::pname(p))].size();
      return s;
    };
    auto a = testsupport::project(classical, counts_of, testsupport::label_transition);
    auto b = testsupport::project(colored, unit_counts, testsupport::label_transition);
    if (a.states != b.states || a.edges != b.edges || classical.size() != colored.size() ||
        classical.edges.size() != colored.edges.size())
      f.add("net " + std::to_string(i));
  }
  return f.outcome("50 nets, zero mismatches");
}

// ------------------------------------------------------- PNRD degeneration

Outcome pnrd_degeneration() {
  std::mt19937_64 rng(6);
  Failures f;
  std::size_t states = 0;
  for (int i = 0; i < 50; ++i) {
    std::mt19937_64 copy = rng;
    auto plain_text = testsupport::random_colored_model_text(rng, false);
    auto skip_text = testsupport::random_colored_model_text(copy, true);
    cpn::ColoredNet cnet(load_model(plain_text));
    pnrd::PnrdNet rnet(load_model(skip_text));
    ExploreBounds bounds{1000000, 6};
    auto cg = cpn::explore(cnet, cnet.initial_marking(), bounds);
    auto rg = pnrd::explore(rnet, rnet.initial_state(), bounds);
    states += cg.size();
    bool same = cg.size() == rg.size() && cg.edges.size() == rg.edges.size();
    for (std::size_t n = 0; same && n < cg.size(); ++n)
      same = cg.states[n].key(cnet.model()) == rg.states[n].marking.key(rnet.model()) && rg.states[n].store.size() == 0;
    for (std::size_t e = 0; same && e < cg.edges.size(); ++e)
      same = cg.edges[e].from == rg.edges[e].from && cg.edges[e].to == rg.edges[e].to &&
             cg.edges[e].label == rg.edges[e].label;
    if (!same) f.add("model " + std::to_string(i));
  }
  return f.outcome("50 models, " + std::to_string(states) + " states, identical graphs");
}

// ------------------------------------------------------------------- fig3

bool includes(const Value& small, const Value& big) {
  return std::includes(big.items().begin(), big.items().end(), small.items().begin(), small.items().end());
}

Outcome fig3_portfolio() {
  auto model = corpus::load("fig3");
  pnrd::PnrdNet net(model);
  Failures f;
  auto g = pnrd::explore(net, net.initial_state(), {100000});
  if (g.truncated) f.add("exploration truncated at 100000 states");

  // (a) choose-course modes against a direct set-inclusion oracle
  auto choose = net.transition("choose course");
  auto pool = model->place("student pool");
  auto courses = model->place("course pool");
  std::size_t pairs = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto& s = g.states[n];
    std::set<std::pair<std::int64_t, std::int64_t>> want, got;
    for (const auto& [st, _] : s.marking.tokens[pool]) {
      const Value& portfolio = s.store.at(st.items()[1].pointer_name());
      for (const auto& [course, _c] : s.marking.tokens[courses]) {
        std::int64_t c = course.items()[0].as_int();
        bool prereqs = includes(course.items()[2], portfolio.field("completed"));
        bool chosen = portfolio.field("enrolled").set_contains(course.items()[0]);
        if (prereqs && !chosen) want.insert({st.items()[0].as_int(), c});
      }
    }
    for (const auto& b : pnrd::enumerate_bindings(net, s, choose)) got.insert({b.find("id")->as_int(), b.find("c")->as_int()});
    pairs += want.size();
    if (want != got) f.add("state " + std::to_string(n));
  }

  // (b) portfolio consistency
  auto r = analysis::check_invariant(g, model->invariant("portfolio consistency"));
  if (!r.holds) f.add("portfolio consistency violated");

  // (c) failing the exam returns the student to enrolled
  auto sc = corpus::scenario("fig3-fail-exam");
  auto script = corpus::resolve(*model, sc.steps);
  if (script.empty() || model->transitions[script.back().transition].name != "fail exam")
    return {false, "scenario does not end with fail exam"};
  ReferenceEngine engine(model);
  auto trace = sim::run_script(engine, engine.initial(), script);
  auto cur = engine.initial();
  for (const auto& m : script) cur = engine.fire(cur, m);
  Value who = script.back().binding.find("id") ? *script.back().binding.find("id") : Value();
  bool back = false;
  for (const auto& [tok, _] : cur.marking.tokens[model->place("enrolled student")])
    back = back || tok.items()[0] == who;
  if (!back || !cur.marking.tokens[model->place("student on exam")].empty()) f.add("fail exam did not return to enrolled");
  if (!sim::replay(engine, engine.initial(), trace).ok) f.add("fail-exam trace does not replay");

  return f.outcome(std::to_string(g.size()) + " states, " + std::to_string(pairs) +
                   " oracle pairs, invariant holds, fail exam returns to enrolled");
}

// ------------------------------------------------------------------- fig4

Outcome fig4_teams() {
  auto model = corpus::load("fig4");
  pnrd::PnrdNet net(model);
  Failures f;
  auto g = pnrd::explore(net, net.initial_state());
  if (g.truncated) f.add("exploration truncated");
  for (const char* name : {"distinct roles in new teams", "distinct roles in project teams", "project exclusivity",
                           "selected projects leave the pool"})
    if (!analysis::check_invariant(g, model->invariant(name)).holds) f.add(std::string(name) + " violated");

  const std::string cut = " && r1 != r2 && r1 != r3 && r2 != r3";
  auto text = corpus::read_file(corpus::model_path("fig4"));
  auto at = text.find(cut);
  if (at == std::string::npos) return {false, "team guard not found for mutation"};
  auto mutant = load_model(text.erase(at, cut.size()));
  pnrd::PnrdNet mnet(mutant);
  auto mg = pnrd::explore(mnet, mnet.initial_state());
  auto r = analysis::check_invariant(mg, mutant->invariant("distinct roles in new teams"));
  std::size_t len = r.path.size();
  if (r.holds) f.add("mutant not caught");
  else if (len > 10) f.add("counterexample of length " + std::to_string(len));
  return f.outcome(std::to_string(g.size()) + " states, invariants hold; mutant counterexample of " +
                   std::to_string(len) + " steps");
}

// -------------------------------------------------------------- determinism

std::string slurp(const fs::path& p) { return corpus::read_file(p); }

Outcome determinism(const fs::path& work) {
  Failures f;
  struct Run {
    const char* model;
    const char* seed;
    const char* steps;
  };
  std::vector<Run> runs{{"fig2", "11", "60"}, {"fig3", "12", "150"}, {"fig4", "13", "200"}};
  for (const auto& r : runs) {
    std::string first;
    for (int k = 0; k < 5; ++k) {
      fs::path out = work / (std::string(r.model) + "-" + std::to_string(k) + ".json");
      std::string cmd = std::string("\"") + LEARNFLOW_CLI + "\" simulate " + r.model + " --seed " + r.seed +
                        " --max-steps " + r.steps + " --traces 3 --out \"" + out.string() + "\"";
      if (std::system(cmd.c_str()) != 0) {
        f.add(std::string(r.model) + ": cli failed");
        break;
      }
      std::string bytes = slurp(out);
      if (k == 0) first = bytes;
      else if (bytes != first) f.add(std::string(r.model) + ": run " + std::to_string(k) + " differs");
    }
    // the library in this process writes the same bytes
    // (the command line runs colored-only models on the colored engine)
    auto model = corpus::load(r.model);
    auto in_process = [&](const auto& e) {
      std::vector<sim::Trace> traces;
      for (std::uint64_t i = 0; i < 3; ++i)
        traces.push_back(sim::simulate(e, e.initial(), std::stoull(r.seed) + i, std::stoul(r.steps)));
      return sim::dump_traces(traces);
    };
    std::string mine = model->is_colored_only() ? in_process(ColoredEngine(model)) : in_process(ReferenceEngine(model));
    if (!first.empty() && mine != first) f.add(std::string(r.model) + ": in-process trace differs");
  }
  return f.outcome("3 models x 5 processes, byte-identical trace files");
}

// ------------------------------------------------------------------- replay

template <class Engine>
void replay_many(const Engine& e, const std::string& name, std::uint64_t base, int count, Failures& f, int& done) {
  for (int i = 0; i < count; ++i) {
    auto t = sim::simulate(e, e.initial(), base + i, 100);
    auto parsed = sim::parse_traces(sim::dump_traces({t}));
    auto r = sim::replay(e, e.initial(), parsed.at(0));
    if (!r.ok || r.steps != t.steps.size()) f.add(name + " seed " + std::to_string(base + i) + ": " + r.error);
    ++done;
  }
}

Outcome trace_replay() {
  Failures f;
  int done = 0;
  ClassicalEngine fig1(classical_from_model(*corpus::load("fig1")));
  replay_many(fig1, "fig1", 0, 200, f, done);
  ColoredEngine fig2(corpus::load("fig2"));
  replay_many(fig2, "fig2", 0, 200, f, done);
  for (const char* id : {"fig3", "fig4", "fig4-six"}) {
    ReferenceEngine e(corpus::load(id));
    replay_many(e, id, 0, 200, f, done);
  }
  return f.outcome(std::to_string(done) + " traces replayed");
}

}  // namespace

int main() {
  fs::path work = fs::temp_directory_path() / ("learnflow-acceptance-" + std::to_string(std::random_device{}()));
  fs::create_directories(work);

  std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"multiset algebra laws", multiset_laws},
      {"classical firing matches exhaustive enumeration", classical_oracle},
      {"fig1 is a sound workflow net", fig1_workflow},
      {"fig2 mode counts and prerequisite gating", fig2_modes},
      {"unit-colored nets behave like classical nets", cpn_degeneration},
      {"pointer-free reference nets behave like colored nets", pnrd_degeneration},
      {"fig3 prerequisites, portfolio invariant, failed exam", fig3_portfolio},
      {"fig4 team invariants and guard mutation", fig4_teams},
      {"deterministic trace files", [&] { return determinism(work); }},
      {"simulator traces replay", trace_replay},
  };

  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.ok) ++failed;
    std::cout << "[" << (i + 1) << "] " << (o.ok ? "PASS" : "FAIL") << "  " << checks[i].first << " (" << o.detail
              << ")" << std::endl;
  }
  std::error_code ec;
  fs::remove_all(work, ec);
  std::cout << (checks.size() - failed) << "/" << checks.size() << " passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
