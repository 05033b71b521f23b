#include "prederr/service.hpp"

#include <random>
#include <regex>

#include "httplib.h"
#include "prederr/report.hpp"

namespace prederr {

using nlohmann::json;

namespace {

ServiceResponse error(int status, const std::string &code, const std::string &message) {
  return {status, json{{"code", code}, {"message", message}}.dump(), "application/json"};
}

ServiceResponse ok(int status, const json &body) {
  return {status, body.dump(), "application/json"};
}

int status_for(ProtocolError::Code code) {
  switch (code) {
  case ProtocolError::Code::inconsistent_learner:
  case ProtocolError::Code::malformed_event:
    return 400;
  default:
    return 422;
  }
}

LearnerSpec spec_from_request(const json &j) {
  if (!j.contains("learner") || !j["learner"].is_string())
    throw InvalidLearnerSpec("missing learner");
  LearnerSpec spec;
  spec.kind = learner_kind_from_string(j["learner"].get<std::string>());
  spec.lambda = j.value("lambda", 0.0);
  spec.k = j.value("k", spec.kind == LearnerKind::knn ? 3 : 1);
  spec.validate();
  return spec;
}

} // namespace

json session_state(const std::string &id, const TeachingSession &session,
                   std::uint64_t version) {
  const auto &ctx = session.context();
  json j;
  j["id"] = id;
  j["version"] = version;
  j["phase"] = to_string(session.phase());
  j["outcome"] = to_string(session.outcome());
  j["round"] = session.round();
  j["learner"] = to_string(session.spec().kind);
  j["training"] = training_to_json(session.training());
  j["features"] = session.features().ids();
  json pool = json::array();
  for (const auto &f : ctx.pool.defs())
    pool.push_back({{"id", f.id},
                    {"expr", f.expr.source()},
                    {"in_use", session.features().contains(f.id)}});
  j["pool"] = std::move(pool);
  j["training_error_ids"] = session.training_error_ids();
  auto pending = session.pending();
  j["pending_request"] = pending ? json(to_string(*pending)) : json(nullptr);
  const auto &inv = session.invalidation_set();
  j["invalidation_set"] = inv ? invalidation_to_json(*inv) : json(nullptr);
  j["hypothesis"] = hypothesis_to_json(session.hypothesis());

  json objects = json::array();
  json predictions = json::object();
  std::vector<std::array<double, 2>> plane;
  for (const auto &o : ctx.universe.objects()) {
    auto v = featurize(session.features(), o);
    Label y = predict(session.hypothesis(), v);
    predictions[o.id] = to_int(y);
    objects.push_back({{"id", o.id}, {"attrs", o.attrs}, {"x", v}});
    if (v.size() == 2)
      plane.push_back({v[0], v[1]});
  }
  j["objects"] = std::move(objects);
  j["predictions"] = std::move(predictions);

  j["boundary_polyline"] = nullptr;
  if (const auto *lin = std::get_if<LinearHypothesis>(&session.hypothesis());
      lin && lin->w.size() == 2) {
    json line = json::array();
    for (const auto &p : linear_boundary(*lin, bounding_box(plane)))
      line.push_back({p[0], p[1]});
    j["boundary_polyline"] = std::move(line);
  }
  return j;
}

std::size_t SessionService::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::string SessionService::new_id() {
  std::random_device rd;
  static constexpr char hex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 8; ++i) {
    auto word = rd();
    for (int k = 0; k < 4; ++k) {
      id += hex[(word >> (8 * k)) & 0xF];
      id += hex[(word >> (8 * k + 4)) & 0xF];
    }
  }
  return id;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string &id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

ServiceResponse SessionService::handle(const ServiceRequest &request) {
  static const std::regex session_re(R"(^/sessions/([0-9a-f]+)$)");
  static const std::regex action_re(R"(^/sessions/([0-9a-f]+)/actions$)");
  static const std::regex events_re(R"(^/sessions/([0-9a-f]+)/events$)");
  std::smatch m;
  const auto &path = request.path;
  const auto &method = request.method;
  try {
    if (path == "/sessions") {
      if (method == "POST")
        return create_session(request.body);
      return error(405, "method_not_allowed", method + " " + path);
    }
    if (path == "/scenarios") {
      if (method == "GET")
        return list_scenarios();
      return error(405, "method_not_allowed", method + " " + path);
    }
    if (std::regex_match(path, m, session_re)) {
      if (method == "GET")
        return get_state(m[1]);
      return error(405, "method_not_allowed", method + " " + path);
    }
    if (std::regex_match(path, m, action_re)) {
      if (method == "POST")
        return post_action(m[1], request.body);
      return error(405, "method_not_allowed", method + " " + path);
    }
    if (std::regex_match(path, m, events_re)) {
      if (method == "GET")
        return get_events(m[1]);
      return error(405, "method_not_allowed", method + " " + path);
    }
    return error(404, "not_found", "no route for " + path);
  } catch (const std::exception &e) {
    return error(500, "internal", e.what());
  }
}

ServiceResponse SessionService::list_scenarios() const {
  json list = json::array();
  for (const auto &name : builtin_scenario_names()) {
    auto s = builtin_scenario(name);
    list.push_back({{"name", name},
                    {"objects", s.universe.size()},
                    {"pool", s.pool.size()}});
  }
  return ok(200, {{"scenarios", std::move(list)}});
}

ServiceResponse SessionService::create_session(const std::string &body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    return error(400, "malformed_request", "request body must be a JSON object");

  Scenario scenario;
  try {
    if (!j.contains("scenario"))
      return error(400, "malformed_request", "missing scenario");
    const auto &sc = j["scenario"];
    if (sc.is_string())
      scenario = builtin_scenario(sc.get<std::string>());
    else
      scenario = scenario_from_json(sc);
  } catch (const ScenarioError &e) {
    return error(400, "invalid_scenario", e.what());
  } catch (const std::invalid_argument &e) {
    return error(400, "unknown_scenario", e.what());
  }

  LearnerSpec spec;
  try {
    spec = spec_from_request(j);
  } catch (const InvalidLearnerSpec &e) {
    return error(400, "invalid_learner", e.what());
  } catch (const json::exception &e) {
    return error(400, "invalid_learner", e.what());
  }

  std::shared_ptr<Entry> entry;
  try {
    auto session = TeachingSession::from_scenario(scenario, spec);
    entry = std::make_shared<Entry>(std::move(scenario), std::move(session));
  } catch (const ProtocolError &e) {
    return error(400, to_string(e.code()), e.what());
  }

  std::string id;
  {
    std::lock_guard lock(mutex_);
    do
      id = new_id();
    while (sessions_.count(id));
    sessions_[id] = entry;
  }
  std::lock_guard lock(entry->mutex);
  return ok(201, {{"id", id}, {"state", session_state(id, entry->session, entry->version)}});
}

ServiceResponse SessionService::get_state(const std::string &id) {
  auto entry = find(id);
  if (!entry)
    return error(404, "unknown_session", "no session '" + id + "'");
  std::lock_guard lock(entry->mutex);
  return ok(200, session_state(id, entry->session, entry->version));
}

ServiceResponse SessionService::get_events(const std::string &id) {
  auto entry = find(id);
  if (!entry)
    return error(404, "unknown_session", "no session '" + id + "'");
  std::lock_guard lock(entry->mutex);
  return {200, events_to_jsonl(entry->session.events()), "application/x-ndjson"};
}

ServiceResponse SessionService::post_action(const std::string &id, const std::string &body) {
  auto entry = find(id);
  if (!entry)
    return error(404, "unknown_session", "no session '" + id + "'");
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    return error(400, "malformed_request", "request body must be a JSON object");
  if (!j.contains("version") || !j["version"].is_number_integer())
    return error(400, "malformed_request", "missing integer version");
  if (!j.contains("response"))
    return error(400, "malformed_request", "missing response");

  TeacherResponse response;
  try {
    response = response_from_json(j["response"]);
  } catch (const ProtocolError &e) {
    return error(400, "malformed_request", e.what());
  }

  std::lock_guard lock(entry->mutex);
  if (j["version"].get<std::int64_t>() != static_cast<std::int64_t>(entry->version))
    return error(409, "version_conflict",
                 "session is at version " + std::to_string(entry->version));
  try {
    auto next = step(entry->session, response);
    entry->session = std::move(next);
  } catch (const ProtocolError &e) {
    return error(status_for(e.code()), to_string(e.code()), e.what());
  }
  ++entry->version;
  return ok(200, session_state(id, entry->session, entry->version));
}

struct HttpServer::Impl {
  explicit Impl(SessionService &s) : service(s) {}
  SessionService &service;
  httplib::Server server;
};

HttpServer::HttpServer(SessionService &service)
    : impl_(std::make_unique<Impl>(service)) {
  auto forward = [this](const httplib::Request &req, httplib::Response &res) {
    auto out = impl_->service.handle({req.method, req.path, req.body});
    res.status = out.status;
    res.set_content(out.body, out.content_type);
    res.set_header("Access-Control-Allow-Origin", "*");
  };
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void *>(&yes),
               sizeof(yes));
  });
  impl_->server.Get(".*", forward);
  impl_->server.Post(".*", forward);
  impl_->server.Options(".*", [](const httplib::Request &, httplib::Response &res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string &host, int port) {
  if (port == 0) {
    int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0)
      throw PortUnavailable("cannot bind " + host + " to any port");
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw PortUnavailable("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

} // namespace prederr
