#pragma once

#include <json.hpp>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "analysis.hpp"
#include "lp.hpp"

namespace relint {

using Clock = std::function<std::chrono::steady_clock::time_point()>;

struct ServiceOptions {
  std::chrono::seconds session_ttl{3600};
  // Wall-clock budget of a single fit or constraint recompute.
  std::chrono::milliseconds request_budget{60000};
  std::size_t max_payload = 2 * 1024 * 1024;
  // Value of Access-Control-Allow-Origin; empty disables CORS headers.
  std::string cors_origin = "*";
  // Served under / when set.
  std::filesystem::path static_dir;
  int workers = 0;
  // Drives session expiry; steady_clock::now when empty.
  Clock clock;
  const lp::LpSolver* solver = nullptr;
};

struct Session {
  std::string id;
  std::string csv;
  std::string label_column;
  AnalysisResult analysis;  // never changes after creation

  // Guards `constrained`. Recomputes hold it exclusively.
  mutable std::shared_mutex mutex;
  std::optional<ConstrainedResult> constrained;

  std::chrono::steady_clock::time_point created;
  std::chrono::steady_clock::time_point last_access;
};

// In-memory sessions with idle expiry.
class SessionStore {
 public:
  SessionStore(std::chrono::seconds ttl, Clock clock);

  std::shared_ptr<Session> add(std::string csv, std::string label_column,
                               AnalysisResult analysis);
  // nullptr for unknown or expired ids. Refreshes the idle timer.
  std::shared_ptr<Session> find(const std::string& id);
  bool erase(const std::string& id);
  // Drops expired sessions; returns how many.
  std::size_t sweep();
  std::size_t size() const;

 private:
  std::chrono::steady_clock::time_point now() const;

  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

// {schema, label, csv, params, constraints}. Enough to rebuild the session.
nlohmann::json export_session(const Session& session);

class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws Error(kIo).
  int bind(const std::string& host, int port);
  // Serves until stop(). bind() first.
  void run();
  void stop();
  bool running() const;

  SessionStore& sessions();

  // Rebuilds a session from export_session() output; returns its id.
  std::string import_session(const nlohmann::json& saved);
  void save_session(const std::string& id, const std::filesystem::path& path);
  std::string load_session(const std::filesystem::path& path);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace relint
