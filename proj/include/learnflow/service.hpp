#pragma once

// Token-game sessions over the reference engine, and their HTTP routes.

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "learnflow/engine.hpp"

namespace httplib {
class Server;
}

namespace learnflow::service {

using nlohmann::json;

/// Carries the HTTP status for a failed request.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& message, json details = nullptr)
      : std::runtime_error(message), status_(status), details_(std::move(details)) {}
  int status() const { return status_; }
  const json& details() const { return details_; }

 private:
  int status_;
  json details_;
};

/// Token multiset as a list of value texts, repeated by count, in canonical order.
json tokens_json(const lang::TokenBag& bag);
json state_json(const lang::Model& model, const pnrd::PnrdState& s);
/// Per-place added/removed tokens and changed store cells between two states.
json delta_json(const lang::Model& model, const pnrd::PnrdState& before, const pnrd::PnrdState& after);

class Session {
 public:
  Session(std::string id, lang::ModelPtr model, std::uint64_t rng_seed);

  const std::string& id() const { return id_; }
  const ReferenceEngine& engine() const { return engine_; }
  std::uint64_t version() const { return version_; }
  std::size_t cursor() const { return cursor_; }
  const std::vector<pnrd::PnrdState>& history() const { return history_; }
  const std::vector<Mode>& fired() const { return fired_; }
  const pnrd::PnrdState& current() const { return history_[cursor_]; }

  json state() const;
  json enabled() const;
  /// Throws ServiceError 409 when `state_version` is stale or the index is out of range.
  json fire(std::size_t mode_index, std::uint64_t state_version);
  /// Throws ServiceError 409 at the initial state.
  json undo();
  json reset();
  /// Uniform choice among enabled modes; with a seed the choice depends only on
  /// the seed and the current mode list. 409 when nothing is enabled.
  json random_step(std::optional<std::uint64_t> seed);

  std::mutex& mutex() { return mutex_; }

 private:
  json apply(const Mode& m);

  std::string id_;
  ReferenceEngine engine_;
  std::vector<pnrd::PnrdState> history_;
  std::vector<Mode> fired_;  // fired_[k] leads from history_[k] to history_[k + 1]
  std::size_t cursor_ = 0;
  std::uint64_t version_ = 0;
  std::mt19937_64 rng_;
  std::mutex mutex_;
};

class SessionManager {
 public:
  using Clock = std::chrono::steady_clock;

  explicit SessionManager(std::chrono::seconds ttl = std::chrono::minutes(30),
                          std::function<Clock::time_point()> now = Clock::now);

  /// Body: {"source": text} or {"corpusId": id}. Throws ServiceError 400 with
  /// located diagnostics for models that fail to parse or type check.
  json create(const json& body);
  /// Throws ServiceError 404 for unknown or expired sessions.
  std::shared_ptr<Session> get(const std::string& id);
  std::size_t size();
  /// Drops sessions idle for longer than the TTL.
  void sweep();

 private:
  struct Entry {
    std::shared_ptr<Session> session;
    Clock::time_point last_access;
  };
  std::chrono::seconds ttl_;
  std::function<Clock::time_point()> now_;
  std::map<std::string, Entry> sessions_;
  std::mt19937_64 ids_;
  std::mutex mutex_;
};

/// Registers the session endpoints, and serves `static_dir` at / if non-empty.
void install_routes(httplib::Server& server, SessionManager& sessions, const std::string& static_dir = {});

}  // namespace learnflow::service
