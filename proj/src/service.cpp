#include "learnflow/service.hpp"

#include <httplib.h>

#include "learnflow/corpus.hpp"
#include "learnflow/lang/diagnostic.hpp"

namespace learnflow::service {

json tokens_json(const lang::TokenBag& bag) {
  json out = json::array();
  for (const auto& [text, n] : canonical_entries(bag))
    for (Count i = 0; i < n; ++i) out.push_back(text);
  return out;
}

json state_json(const lang::Model& model, const pnrd::PnrdState& s) {
  json places = json::object();
  for (std::size_t p = 0; p < model.places.size(); ++p) places[model.places[p].name] = tokens_json(s.marking.tokens[p]);
  json store = json::object();
  for (const auto& ptr : s.store.pointers()) store[ptr] = s.store.at(ptr).to_string();
  return {{"places", places}, {"store", store}};
}

json delta_json(const lang::Model& model, const pnrd::PnrdState& before, const pnrd::PnrdState& after) {
  json places = json::object();
  for (std::size_t p = 0; p < model.places.size(); ++p) {
    const auto& a = before.marking.tokens[p];
    const auto& b = after.marking.tokens[p];
    if (a == b) continue;
    places[model.places[p].name] = {{"added", tokens_json(ms_subtract(b, a))}, {"removed", tokens_json(ms_subtract(a, b))}};
  }
  json store = json::object();
  for (const auto& ptr : after.store.pointers()) {
    std::string now = after.store.at(ptr).to_string();
    if (!before.store.allocated(ptr)) {
      store[ptr] = {{"before", nullptr}, {"after", now}};
    } else if (std::string was = before.store.at(ptr).to_string(); was != now) {
      store[ptr] = {{"before", was}, {"after", now}};
    }
  }
  return {{"places", places}, {"store", store}};
}

Session::Session(std::string id, lang::ModelPtr model, std::uint64_t rng_seed)
    : id_(std::move(id)), engine_(std::move(model)), rng_(rng_seed) {
  history_.push_back(engine_.initial());
}

json Session::state() const {
  json j = state_json(engine_.model(), current());
  j["session"] = id_;
  j["version"] = version_;
  j["cursor"] = cursor_;
  j["historyLength"] = history_.size();
  j["terminal"] = engine_.modes(current()).empty();
  return j;
}

json Session::enabled() const {
  json modes = json::array();
  auto list = engine_.modes(current());
  for (std::size_t i = 0; i < list.size(); ++i) {
    json binding = json::object();
    for (const auto& [var, val] : engine_.binding(list[i])) binding[var] = val;
    modes.push_back({{"modeIndex", i},
                     {"transition", engine_.transition_name(list[i])},
                     {"binding", binding},
                     {"label", list[i].label(engine_.model())}});
  }
  return {{"version", version_}, {"modes", modes}};
}

json Session::apply(const Mode& m) {
  pnrd::PnrdState next;
  try {
    next = engine_.fire(current(), m);
  } catch (const lang::EvalError& e) {
    throw ServiceError(422, e.what());
  }
  history_.resize(cursor_ + 1);
  fired_.resize(cursor_);
  history_.push_back(std::move(next));
  fired_.push_back(m);
  ++cursor_;
  ++version_;
  json j = state();
  j["fired"] = {{"transition", engine_.transition_name(m)}, {"label", m.label(engine_.model())}};
  j["delta"] = delta_json(engine_.model(), history_[cursor_ - 1], history_[cursor_]);
  return j;
}

json Session::fire(std::size_t mode_index, std::uint64_t state_version) {
  if (state_version != version_)
    throw ServiceError(409, "stale state version " + std::to_string(state_version) + ", current is " +
                                std::to_string(version_));
  auto modes = engine_.modes(current());
  if (mode_index >= modes.size())
    throw ServiceError(409, "mode index " + std::to_string(mode_index) + " is not enabled (" +
                                std::to_string(modes.size()) + " modes)");
  return apply(modes[mode_index]);
}

json Session::undo() {
  if (cursor_ == 0) throw ServiceError(409, "already at the initial state");
  --cursor_;
  ++version_;
  return state();
}

json Session::reset() {
  cursor_ = 0;
  ++version_;
  return state();
}

json Session::random_step(std::optional<std::uint64_t> seed) {
  auto modes = engine_.modes(current());
  if (modes.empty()) throw ServiceError(409, "no enabled mode");
  std::size_t pick;
  if (seed) {
    std::mt19937_64 rng(*seed);
    pick = pnrd::uniform_index(rng, modes.size());
  } else {
    pick = pnrd::uniform_index(rng_, modes.size());
  }
  return apply(modes[pick]);
}

SessionManager::SessionManager(std::chrono::seconds ttl, std::function<Clock::time_point()> now)
    : ttl_(ttl), now_(std::move(now)), ids_(std::random_device{}()) {}

json SessionManager::create(const json& body) {
  lang::ModelPtr model;
  try {
    if (body.is_object() && body.contains("corpusId")) {
      std::string id = body.at("corpusId").get<std::string>();
      if (!corpus::is_id(id)) throw ServiceError(400, "unknown corpus id '" + id + "'");
      model = corpus::load(id);
    } else if (body.is_object() && body.contains("source")) {
      model = lang::load_model(body.at("source").get<std::string>());
    } else {
      throw ServiceError(400, "request needs 'source' or 'corpusId'");
    }
  } catch (const lang::ModelError& e) {
    json diags = json::array();
    for (const auto& d : e.diagnostics())
      diags.push_back({{"line", d.loc.line}, {"column", d.loc.column}, {"message", d.message}});
    throw ServiceError(400, "model has errors", {{"diagnostics", diags}});
  } catch (const json::exception& e) {
    throw ServiceError(400, std::string("bad request: ") + e.what());
  }

  std::lock_guard lock(mutex_);
  std::string id;
  do id = hex64(ids_());
  while (sessions_.count(id));
  auto s = std::make_shared<Session>(id, std::move(model), ids_());
  sessions_[id] = {s, now_()};
  std::lock_guard slock(s->mutex());
  return s->state();
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end() || now_() - it->second.last_access > ttl_) {
    if (it != sessions_.end()) sessions_.erase(it);
    throw ServiceError(404, "unknown session '" + id + "'");
  }
  it->second.last_access = now_();
  return it->second.session;
}

std::size_t SessionManager::size() {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionManager::sweep() {
  std::lock_guard lock(mutex_);
  auto t = now_();
  std::erase_if(sessions_, [&](const auto& kv) { return t - kv.second.last_access > ttl_; });
}

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw ServiceError(400, std::string("invalid JSON: ") + e.what());
  }
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, 200, fn(req));
    } catch (const ServiceError& e) {
      json body{{"error", e.what()}};
      if (e.details().is_object()) body.update(e.details());
      send(res, e.status(), body);
    } catch (const std::exception& e) {
      send(res, 500, {{"error", e.what()}});
    }
  };
}

template <class Fn>
httplib::Server::Handler with_session(SessionManager& sessions, Fn fn) {
  return guarded([&sessions, fn](const httplib::Request& req) {
    auto s = sessions.get(req.matches[1]);
    std::lock_guard lock(s->mutex());
    return fn(*s, req);
  });
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions, const std::string& static_dir) {
  server.Post("/sessions", guarded([&sessions](const httplib::Request& req) {
                sessions.sweep();
                return sessions.create(parse_body(req));
              }));
  server.Get(R"(/sessions/([0-9a-f]+)/state)",
             with_session(sessions, [](Session& s, const httplib::Request&) { return s.state(); }));
  server.Get(R"(/sessions/([0-9a-f]+)/enabled)",
             with_session(sessions, [](Session& s, const httplib::Request&) { return s.enabled(); }));
  server.Post(R"(/sessions/([0-9a-f]+)/fire)", with_session(sessions, [](Session& s, const httplib::Request& req) {
                json body = parse_body(req);
                if (!body.contains("modeIndex") || !body.contains("stateVersion"))
                  throw ServiceError(400, "fire needs 'modeIndex' and 'stateVersion'");
                try {
                  return s.fire(body.at("modeIndex").get<std::size_t>(), body.at("stateVersion").get<std::uint64_t>());
                } catch (const json::exception& e) {
                  throw ServiceError(400, std::string("bad request: ") + e.what());
                }
              }));
  server.Post(R"(/sessions/([0-9a-f]+)/undo)",
              with_session(sessions, [](Session& s, const httplib::Request&) { return s.undo(); }));
  server.Post(R"(/sessions/([0-9a-f]+)/reset)",
              with_session(sessions, [](Session& s, const httplib::Request&) { return s.reset(); }));
  server.Post(R"(/sessions/([0-9a-f]+)/random-step)",
              with_session(sessions, [](Session& s, const httplib::Request& req) {
                json body = parse_body(req);
                std::optional<std::uint64_t> seed;
                if (body.contains("seed") && !body.at("seed").is_null()) {
                  if (!body.at("seed").is_number_unsigned() && !body.at("seed").is_number_integer())
                    throw ServiceError(400, "seed must be an integer");
                  seed = body.at("seed").get<std::uint64_t>();
                }
                return s.random_step(seed);
              }));
  if (!static_dir.empty() && !server.set_mount_point("/", static_dir))
    throw std::runtime_error("cannot serve static files from " + static_dir);
}

}  // namespace learnflow::service
