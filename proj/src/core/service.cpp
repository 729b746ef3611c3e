#include "service.hpp"

#include <httplib.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "data.hpp"
#include "error.hpp"
#include "report.hpp"

namespace relint {

using nlohmann::json;

SessionStore::SessionStore(std::chrono::seconds ttl, Clock clock)
    : ttl_(ttl), clock_(std::move(clock)) {}

std::chrono::steady_clock::time_point SessionStore::now() const {
  return clock_ ? clock_() : std::chrono::steady_clock::now();
}

namespace {

std::string new_session_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  std::ostringstream out;
  out << std::hex;
  for (int k = 0; k < 2; ++k) {
    out.width(16);
    out.fill('0');
    out << rng();
  }
  return out.str();
}

}  // namespace

std::shared_ptr<Session> SessionStore::add(std::string csv, std::string label_column,
                                           AnalysisResult analysis) {
  auto session = std::make_shared<Session>();
  session->csv = std::move(csv);
  session->label_column = std::move(label_column);
  session->analysis = std::move(analysis);
  session->created = session->last_access = now();
  std::lock_guard lock(mutex_);
  std::erase_if(sessions_, [&](const auto& entry) {
    return session->created - entry.second->last_access >= ttl_;
  });
  do {
    session->id = new_session_id();
  } while (sessions_.contains(session->id));
  sessions_[session->id] = session;
  return session;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) {
  const auto t = now();
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  if (t - it->second->last_access >= ttl_) {
    sessions_.erase(it);
    return nullptr;
  }
  it->second->last_access = t;
  return it->second;
}

bool SessionStore::erase(const std::string& id) {
  const auto t = now();
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) return false;
  const bool live = t - it->second->last_access < ttl_;
  sessions_.erase(it);
  return live;
}

std::size_t SessionStore::sweep() {
  const auto t = now();
  std::lock_guard lock(mutex_);
  return std::erase_if(sessions_, [&](const auto& entry) {
    return t - entry.second->last_access >= ttl_;
  });
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

json export_session(const Session& session) {
  json constraints = json::array();
  {
    std::shared_lock lock(session.mutex);
    if (session.constrained) {
      for (const auto& [l, range] : session.constrained->constraints) {
        constraints.push_back({{"feature", l}, {"min", range.min}, {"max", range.max}});
      }
    }
  }
  return {{"schema", kSchemaVersion},
          {"label", session.label_column},
          {"csv", session.csv},
          {"params", params_to_json(session.analysis.params)},
          {"constraints", constraints}};
}

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kInfeasible: return 409;
    case ErrorCode::kOptimizationFailure:
    case ErrorCode::kNumericalFailure:
    case ErrorCode::kDegenerateDistribution: return 422;
    case ErrorCode::kBudgetExceeded: return 503;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(dump(body), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

void send_error(httplib::Response& res, const Error& e) {
  send_error(res, http_status(e.code()), to_string(e.code()), e.what());
}

double parse_number(const std::string& text, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("parameter '") + what + "' is not a number");
  }
  return v;
}

long long parse_integer(const std::string& text, const char* what) {
  const double v = parse_number(text, what);
  if (v != std::floor(v) || v < 0 || v > 9.0e15) {
    throw Error(ErrorCode::kInvalidArgument, std::string("parameter '") + what + "' must be a non-negative integer");
  }
  return static_cast<long long>(v);
}

// Parameters named like the CLI flags.
void apply_text_param(AnalyzeParams& params, std::string& label, const std::string& key,
                      const std::string& value) {
  if (key == "label") {
    label = value;
  } else if (key == "delta") {
    params.delta = parse_number(value, "delta");
  } else if (key == "p" || key == "pi_p" || key == "pi-p") {
    params.coverage = parse_number(value, "p");
  } else if (key == "probes" || key == "n_probes") {
    params.n_probes = static_cast<int>(parse_integer(value, "probes"));
  } else if (key == "seed") {
    params.seed = static_cast<std::uint64_t>(parse_integer(value, "seed"));
  }
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  SessionStore store;
  httplib::Server server;
  std::atomic<bool> bound{false};
  std::mutex run_mutex;
  bool stop_requested = false;
  bool started = false;

  explicit Impl(ServiceOptions o)
      : options(std::move(o)), store(options.session_ttl, options.clock) {}

  lp::SolverConfig solver_config() const {
    lp::SolverConfig config;
    if (options.solver != nullptr) config.solver = options.solver;
    config.options.deadline = std::chrono::steady_clock::now() + options.request_budget;
    return config;
  }

  std::shared_ptr<Session> create(std::string csv, std::string label, AnalyzeParams params) {
    params.workers = options.workers;
    const Dataset raw = parse_csv(csv, label, "upload");
    AnalysisResult analysis = analyze(raw, params, solver_config());
    return store.add(std::move(csv), std::move(label), std::move(analysis));
  }

  json created_body(const Session& session) const {
    const auto& a = session.analysis;
    return {{"id", session.id},
            {"baseline", baseline_summary(a.baseline)},
            {"features", a.data.num_features()},
            {"samples", a.data.num_samples()},
            {"counts",
             {{"strong", a.classes.count(RelevanceClass::kStrong)},
              {"weak", a.classes.count(RelevanceClass::kWeak)},
              {"irrelevant", a.classes.count(RelevanceClass::kIrrelevant)}}}};
  }

  json recompute(Session& session, const ConstraintSet& constraints) {
    std::unique_lock lock(session.mutex);
    auto result = apply_constraints(session.analysis, constraints, options.workers, solver_config());
    session.constrained = std::move(result);
    return constrained_to_json(session.analysis, *session.constrained);
  }

  void post_session(const httplib::Request& req, httplib::Response& res) {
    if (req.body.size() > options.max_payload) {
      send_error(res, 413, "PayloadTooLarge", "upload exceeds the size limit");
      return;
    }
    std::string csv;
    std::string label = "label";
    AnalyzeParams params;
    const auto type = req.get_header_value("Content-Type");
    if (req.is_multipart_form_data()) {
      bool have_csv = false;
      for (const auto& [name, part] : req.files) {
        if (!part.filename.empty() || name == "file" || name == "csv") {
          if (!have_csv) {
            csv = part.content;
            have_csv = true;
          }
        } else {
          apply_text_param(params, label, name, part.content);
        }
      }
      if (!have_csv) throw Error(ErrorCode::kParse, "multipart upload has no file part");
    } else if (type.rfind("application/json", 0) == 0) {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
      }
      if (!body.is_object() || !body.contains("csv") || !body["csv"].is_string()) {
        throw Error(ErrorCode::kParse, "JSON upload needs a 'csv' string");
      }
      csv = body["csv"].get<std::string>();
      for (const auto& [key, value] : body.items()) {
        if (key == "csv") continue;
        apply_text_param(params, label, key,
                         value.is_string() ? value.get<std::string>() : value.dump());
      }
    } else {
      csv = req.body;
    }
    for (const auto& [key, value] : req.params) apply_text_param(params, label, key, value);
    params.validate();
    const auto session = create(std::move(csv), std::move(label), params);
    send_json(res, 201, created_body(*session));
  }

  std::shared_ptr<Session> require(const httplib::Request& req) {
    auto session = store.find(req.matches[1]);
    if (!session) throw Error(ErrorCode::kNotFound, "unknown session");
    return session;
  }

  json parse_body(const httplib::Request& req) {
    try {
      return json::parse(req.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("invalid JSON: ") + e.what());
    }
  }

  // Wraps a handler so relint errors become JSON error responses.
  template <class Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        (this->*fn)(req, res);
      } catch (const Error& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
      }
    };
  }

  void get_health(const httplib::Request&, httplib::Response& res) {
    store.sweep();
    send_json(res, 200, {{"status", "ok"}, {"sessions", store.size()}});
  }

  void get_results(const httplib::Request& req, httplib::Response& res) {
    const auto session = require(req);
    send_json(res, 200, analysis_to_json(session->analysis));
  }

  void get_constraints(const httplib::Request& req, httplib::Response& res) {
    const auto session = require(req);
    std::shared_lock lock(session->mutex);
    if (session->constrained) {
      send_json(res, 200, constrained_to_json(session->analysis, *session->constrained));
    } else {
      ConstrainedResult none;
      none.intervals = session->analysis.intervals;
      none.intervals.constrained.assign(none.intervals.lower.size(), false);
      none.classes = session->analysis.classes;
      send_json(res, 200, constrained_to_json(session->analysis, none));
    }
  }

  void put_constraints(const httplib::Request& req, httplib::Response& res) {
    const auto session = require(req);
    const auto constraints = constraints_from_json(parse_body(req), session->analysis);
    send_json(res, 200, recompute(*session, constraints));
  }

  void delete_session(const httplib::Request& req, httplib::Response& res) {
    if (!store.erase(req.matches[1])) throw Error(ErrorCode::kNotFound, "unknown session");
    send_json(res, 200, {{"deleted", std::string(req.matches[1])}});
  }

  void get_export(const httplib::Request& req, httplib::Response& res) {
    const auto session = require(req);
    send_json(res, 200, export_session(*session));
  }

  std::shared_ptr<Session> import(const json& saved) {
    if (!saved.is_object() || !saved.contains("csv") || !saved["csv"].is_string()) {
      throw Error(ErrorCode::kParse, "saved session needs a 'csv' string");
    }
    const std::string label = saved.value("label", std::string("label"));
    const AnalyzeParams params = params_from_json(saved.value("params", json::object()));
    auto session = create(saved["csv"].get<std::string>(), label, params);
    if (saved.contains("constraints") && !saved["constraints"].empty()) {
      const auto constraints = constraints_from_json(saved["constraints"], session->analysis);
      recompute(*session, constraints);
    }
    return session;
  }

  void post_import(const httplib::Request& req, httplib::Response& res) {
    if (req.body.size() > options.max_payload) {
      send_error(res, 413, "PayloadTooLarge", "upload exceeds the size limit");
      return;
    }
    json saved;
    try {
      saved = json::parse(req.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
    }
    const auto session = import(saved);
    send_json(res, 201, created_body(*session));
  }

  void install_routes() {
    server.set_payload_max_length(options.max_payload);
    // No SO_REUSEPORT: a second server on the same port must fail to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    if (!options.cors_origin.empty()) {
      server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                  {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"},
                                  {"Access-Control-Allow-Headers", "Content-Type"}});
    }
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/health", guarded(&Impl::get_health));
    server.Post("/sessions", guarded(&Impl::post_session));
    server.Post("/sessions/import", guarded(&Impl::post_import));
    server.Get(R"(/sessions/([0-9a-f]+)/results)", guarded(&Impl::get_results));
    server.Get(R"(/sessions/([0-9a-f]+)/constraints)", guarded(&Impl::get_constraints));
    server.Put(R"(/sessions/([0-9a-f]+)/constraints)", guarded(&Impl::put_constraints));
    server.Get(R"(/sessions/([0-9a-f]+)/export)", guarded(&Impl::get_export));
    server.Delete(R"(/sessions/([0-9a-f]+))", guarded(&Impl::delete_session));
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const char* code = res.status == 404 ? "NotFound"
                         : res.status == 413 ? "PayloadTooLarge"
                                             : "HttpError";
      send_error(res, res.status, code, httplib::status_message(res.status));
    });
    if (!options.static_dir.empty()) {
      if (!server.set_mount_point("/", options.static_dir.string())) {
        throw Error(ErrorCode::kIo, "cannot serve static files from '" +
                                        options.static_dir.string() + "'");
      }
    }
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->install_routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void Service::run() {
  if (!impl_->bound) throw Error(ErrorCode::kIo, "service is not bound to a port");
  {
    std::lock_guard lock(impl_->run_mutex);
    if (impl_->stop_requested) return;
    impl_->started = true;
  }
  impl_->server.listen_after_bind();
}

void Service::stop() {
  {
    std::lock_guard lock(impl_->run_mutex);
    impl_->stop_requested = true;
    if (!impl_->started) return;
  }
  impl_->server.wait_until_ready();
  impl_->server.stop();
}

bool Service::running() const { return impl_->server.is_running(); }

SessionStore& Service::sessions() { return impl_->store; }

std::string Service::import_session(const json& saved) { return impl_->import(saved)->id; }

void Service::save_session(const std::string& id, const std::filesystem::path& path) {
  const auto session = impl_->store.find(id);
  if (!session) throw Error(ErrorCode::kNotFound, "unknown session");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << dump(export_session(*session));
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
}

std::string Service::load_session(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read '" + path.string() + "'");
  json saved;
  try {
    saved = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "invalid session file '" + path.string() + "': " + e.what());
  }
  return import_session(saved);
}

}  // namespace relint
