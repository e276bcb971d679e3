#include <doctest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "learnflow/corpus.hpp"
#include "learnflow/service.hpp"

using namespace learnflow;
using service::json;
using service::ServiceError;
using service::SessionManager;

namespace {

int status_of(auto&& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    return e.status();
  }
  return 200;
}

// Runs the routes on an ephemeral localhost port for the lifetime of the object.
struct LiveServer {
  SessionManager sessions;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  LiveServer() {
    service::install_routes(server, sessions);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

json body(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

}  // namespace

TEST_CASE("sessions from the corpus and from source") {
  SessionManager mgr;
  auto st = mgr.create({{"corpusId", "fig2"}});
  CHECK(st["version"] == 0);
  CHECK(st["cursor"] == 0);
  CHECK(st["terminal"] == false);
  CHECK(st["places"]["student pool"] == json::array({"(1,[1,2])", "(34,[])"}));
  CHECK(st["store"].empty());
  CHECK(st["session"].get<std::string>().size() == 16);

  auto src = mgr.create({{"source", "places a : Unit = 1'();\ntransitions t;\narcs a -> t : 1'();\n"}});
  CHECK(src["places"]["a"] == json::array({"()"}));
  CHECK(mgr.size() == 2);
}

TEST_CASE("bad models come back with located diagnostics") {
  SessionManager mgr;
  try {
    mgr.create({{"source", "places\n  a : Int = 1'\"x\";\n"}});
    FAIL("expected an error");
  } catch (const ServiceError& e) {
    CHECK(e.status() == 400);
    REQUIRE(e.details()["diagnostics"].size() >= 1);
    CHECK(e.details()["diagnostics"][0]["line"] == 2);
    CHECK(e.details()["diagnostics"][0]["column"].get<int>() > 0);
  }
  CHECK(status_of([&] { mgr.create({{"corpusId", "nope"}}); }) == 400);
  CHECK(status_of([&] { mgr.create(json::object()); }) == 400);
  CHECK(status_of([&] { mgr.get("abc"); }) == 404);
}

TEST_CASE("fig2 offers two select-course modes") {
  SessionManager mgr;
  auto s = mgr.get(mgr.create({{"corpusId", "fig2"}})["session"]);
  auto en = s->enabled();
  std::vector<json> selects;
  for (const auto& m : en["modes"])
    if (m["transition"] == "select course") selects.push_back(m);
  REQUIRE(selects.size() == 2);
  CHECK(selects[0]["binding"] == json{{"id", "1"}, {"r", "[1,2]"}});
  CHECK(selects[1]["binding"] == json{{"id", "34"}, {"r", "[]"}});

  auto after = s->fire(selects[1]["modeIndex"], en["version"]);
  CHECK(after["version"] == 1);
  CHECK(after["fired"]["transition"] == "select course");
  CHECK(after["delta"]["places"]["student pool"]["removed"] == json::array({"(34,[])"}));
  CHECK(after["delta"]["places"]["course selected"]["added"] == json::array({"(34,[])"}));
}

TEST_CASE("stale versions, bad indices and undo at the start are conflicts") {
  SessionManager mgr;
  auto s = mgr.get(mgr.create({{"corpusId", "fig3"}})["session"]);
  CHECK(status_of([&] { s->undo(); }) == 409);
  s->fire(0, 0);
  CHECK(status_of([&] { s->fire(0, 0); }) == 409);
  CHECK(status_of([&] { s->fire(999, 1); }) == 409);
  CHECK(s->version() == 1);
}

TEST_CASE("undo, refire and reset") {
  SessionManager mgr;
  auto s = mgr.get(mgr.create({{"corpusId", "fig3"}})["session"]);
  s->fire(0, 0);
  s->fire(0, 1);
  CHECK(s->cursor() == 2);
  auto u = s->undo();
  CHECK(u["cursor"] == 1);
  CHECK(u["historyLength"] == 3);
  CHECK(u["version"] == 3);
  // firing after undo drops the redo tail
  auto f = s->fire(1, 3);
  CHECK(f["cursor"] == 2);
  CHECK(f["historyLength"] == 3);
  CHECK(s->fired().size() == 2);
  auto r = s->reset();
  CHECK(r["cursor"] == 0);
  CHECK(r["store"]["p1"] == "{completed={},courses={},dropped={},enrolled={},grades={}}");
}

TEST_CASE("store changes show in the delta") {
  SessionManager mgr;
  auto s = mgr.get(mgr.create({{"corpusId", "fig3"}})["session"]);
  auto en = s->enabled()["modes"];
  std::size_t idx = 0;
  while (en[idx]["transition"] != "choose course" || en[idx]["binding"]["p"] != "p1") ++idx;
  auto f = s->fire(idx, 0);
  REQUIRE(f["delta"]["store"].contains("p1"));
  CHECK(f["delta"]["store"]["p1"]["before"] != f["delta"]["store"]["p1"]["after"]);
  CHECK_FALSE(f["delta"]["store"].contains("p2"));
}

TEST_CASE("seeded random steps are reproducible") {
  SessionManager mgr;
  auto a = mgr.get(mgr.create({{"corpusId", "fig4"}})["session"]);
  auto b = mgr.get(mgr.create({{"corpusId", "fig4"}})["session"]);
  for (std::uint64_t k = 0; k < 8; ++k) {
    auto ra = a->random_step(k);
    auto rb = b->random_step(k);
    CHECK(ra["fired"] == rb["fired"]);
  }
  CHECK(a->state()["places"] == b->state()["places"]);
}

TEST_CASE("random step at a deadlock is a conflict") {
  SessionManager mgr;
  auto s = mgr.get(mgr.create({{"source", "places a : Unit;\ntransitions t;\narcs a -> t : 1'();\n"}})["session"]);
  CHECK(s->state()["terminal"] == true);
  CHECK(status_of([&] { s->random_step(std::nullopt); }) == 409);
}

TEST_CASE("idle sessions expire") {
  auto now = SessionManager::Clock::time_point{};
  SessionManager mgr(std::chrono::seconds(60), [&] { return now; });
  std::string id = mgr.create({{"corpusId", "fig1"}})["session"];
  now += std::chrono::seconds(50);
  CHECK_NOTHROW(mgr.get(id));
  now += std::chrono::seconds(50);  // 50 s since last access
  CHECK_NOTHROW(mgr.get(id));
  now += std::chrono::seconds(61);
  CHECK(status_of([&] { mgr.get(id); }) == 404);
  mgr.create({{"corpusId", "fig1"}});
  now += std::chrono::seconds(120);
  mgr.sweep();
  CHECK(mgr.size() == 0);
}

TEST_CASE("enabled modes agree with the engine along random walks") {
  for (const char* id : {"fig2", "fig3", "fig4"}) {
    CAPTURE(id);
    SessionManager mgr;
    auto s = mgr.get(mgr.create({{"corpusId", id}})["session"]);
    std::mt19937_64 rng(2024);
    for (int step = 0; step < 20; ++step) {
      auto en = s->enabled();
      auto modes = s->engine().modes(s->current());
      REQUIRE(en["modes"].size() == modes.size());
      for (std::size_t i = 0; i < modes.size(); ++i) {
        CHECK(en["modes"][i]["modeIndex"] == i);
        CHECK(en["modes"][i]["label"] == modes[i].label(s->engine().model()));
      }
      if (modes.empty()) break;
      std::size_t pick = std::uniform_int_distribution<std::size_t>(0, modes.size() - 1)(rng);
      auto expected = s->engine().fire(s->current(), modes[pick]);
      s->fire(pick, en["version"]);
      CHECK(s->current() == expected);
    }
  }
}

TEST_CASE("HTTP endpoints") {
  LiveServer live;
  auto cli = live.client();

  auto created = cli.Post("/sessions", R"({"corpusId": "fig2"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 200);
  std::string id = body(created)["session"];
  std::string base = "/sessions/" + id;

  auto st = cli.Get(base + "/state");
  REQUIRE(st);
  CHECK(st->status == 200);
  CHECK(st->get_header_value("Content-Type") == "application/json");

  auto en = body(cli.Get(base + "/enabled"));
  CHECK(en["modes"].size() == 7);

  auto fired = cli.Post(base + "/fire", R"({"modeIndex": 2, "stateVersion": 0})", "application/json");
  REQUIRE(fired);
  CHECK(fired->status == 200);
  CHECK(body(fired)["fired"]["label"] == "select course{id=1, r=[1,2]}");

  auto stale = cli.Post(base + "/fire", R"({"modeIndex": 0, "stateVersion": 0})", "application/json");
  REQUIRE(stale);
  CHECK(stale->status == 409);
  CHECK(body(stale).contains("error"));

  auto missing = cli.Post(base + "/fire", R"({"modeIndex": 0})", "application/json");
  REQUIRE(missing);
  CHECK(missing->status == 400);

  auto junk = cli.Post(base + "/fire", "{not json", "application/json");
  REQUIRE(junk);
  CHECK(junk->status == 400);

  auto undo = cli.Post(base + "/undo", "", "application/json");
  REQUIRE(undo);
  CHECK(body(undo)["cursor"] == 0);
  auto undo2 = cli.Post(base + "/undo", "", "application/json");
  REQUIRE(undo2);
  CHECK(undo2->status == 409);

  auto rs = cli.Post(base + "/random-step", R"({"seed": 5})", "application/json");
  REQUIRE(rs);
  CHECK(rs->status == 200);
  auto badseed = cli.Post(base + "/random-step", R"({"seed": "x"})", "application/json");
  REQUIRE(badseed);
  CHECK(badseed->status == 400);

  auto reset = cli.Post(base + "/reset", "", "application/json");
  REQUIRE(reset);
  CHECK(body(reset)["cursor"] == 0);

  auto unknown = cli.Get("/sessions/0123456789abcdef/state");
  REQUIRE(unknown);
  CHECK(unknown->status == 404);

  auto bad = cli.Post("/sessions", R"({"source": "places\n  a : Nope;\n"})", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto diag = body(bad)["diagnostics"];
  REQUIRE(diag.size() >= 1);
  CHECK(diag[0]["line"] == 2);
}
