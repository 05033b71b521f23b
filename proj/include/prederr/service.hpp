#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "json.hpp"
#include "prederr/protocol.hpp"
#include "prederr/scenarios.hpp"

namespace prederr {

struct ServiceRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct ServiceResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Teaching sessions behind a JSON API:
//   POST /sessions                {scenario: name | inline, learner, lambda?, k?}
//   GET  /sessions/{id}
//   POST /sessions/{id}/actions   {version, response}
//   GET  /sessions/{id}/events    (JSON lines)
//   GET  /scenarios
// Errors are {code, message}. Actions on one session are serialized and
// versioned; a stale version is rejected with 409.
class SessionService {
public:
  SessionService() = default;

  ServiceResponse handle(const ServiceRequest &request);

  std::size_t session_count() const;

private:
  struct Entry {
    Entry(Scenario s, TeachingSession t) : scenario(std::move(s)), session(std::move(t)) {}
    mutable std::mutex mutex;
    Scenario scenario;
    TeachingSession session;
    std::uint64_t version = 0;
  };

  ServiceResponse create_session(const std::string &body);
  ServiceResponse get_state(const std::string &id);
  ServiceResponse post_action(const std::string &id, const std::string &body);
  ServiceResponse get_events(const std::string &id);
  ServiceResponse list_scenarios() const;

  std::shared_ptr<Entry> find(const std::string &id) const;
  std::string new_id();

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

// State document for one session.
nlohmann::json session_state(const std::string &id, const TeachingSession &session,
                             std::uint64_t version);

class PortUnavailable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// HTTP binding of a SessionService. bind() returns the bound port (0 asks the
// OS for one) and throws PortUnavailable on failure; listen() blocks until
// stop() is called.
class HttpServer {
public:
  explicit HttpServer(SessionService &service);
  ~HttpServer();
  int bind(const std::string &host, int port);
  void listen();
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace prederr
