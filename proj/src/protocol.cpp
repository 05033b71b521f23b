#include "prederr/protocol.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "prederr/diagnosis.hpp"

namespace prederr {

using nlohmann::json;

std::string to_string(Phase p) {
  switch (p) {
  case Phase::await_example:
    return "await_example";
  case Phase::retrained:
    return "retrained";
  case Phase::await_verdict:
    return "await_verdict";
  case Phase::done:
    return "done";
  }
  return "?";
}

std::string to_string(RequestKind r) {
  switch (r) {
  case RequestKind::terminate:
    return "terminate";
  case RequestKind::add_labeled_example:
    return "add_labeled_example";
  case RequestKind::check_labels:
    return "check_labels";
  case RequestKind::correct_labels:
    return "correct_labels";
  case RequestKind::add_feature:
    return "add_feature";
  }
  return "?";
}

std::string to_string(Outcome o) {
  switch (o) {
  case Outcome::running:
    return "running";
  case Outcome::terminated:
    return "terminated";
  case Outcome::not_realizable:
    return "not_realizable";
  }
  return "?";
}

std::string to_string(ProtocolError::Code c) {
  using C = ProtocolError::Code;
  switch (c) {
  case C::illegal_response:
    return "illegal_response";
  case C::session_done:
    return "session_done";
  case C::unknown_object:
    return "unknown_object";
  case C::already_labeled:
    return "already_labeled";
  case C::outside_invalidation_set:
    return "outside_invalidation_set";
  case C::unknown_feature:
    return "unknown_feature";
  case C::feature_in_use:
    return "feature_in_use";
  case C::inconsistent_learner:
    return "inconsistent_learner";
  case C::malformed_event:
    return "malformed_event";
  }
  return "?";
}

Phase phase_from_string(const std::string &s) {
  for (auto p : {Phase::await_example, Phase::retrained, Phase::await_verdict, Phase::done})
    if (to_string(p) == s)
      return p;
  throw ProtocolError(ProtocolError::Code::malformed_event, "unknown phase '" + s + "'");
}

RequestKind request_kind_from_string(const std::string &s) {
  for (auto r : {RequestKind::terminate, RequestKind::add_labeled_example,
                 RequestKind::check_labels, RequestKind::correct_labels,
                 RequestKind::add_feature})
    if (to_string(r) == s)
      return r;
  throw ProtocolError(ProtocolError::Code::malformed_event,
                      "unknown request kind '" + s + "'");
}

RequestKind kind_of(const TeacherResponse &r) {
  return static_cast<RequestKind>(r.index());
}

TeachingSession::TeachingSession(std::shared_ptr<const TeachingContext> context,
                                 LearnerSpec spec, ProtocolOptions options)
    : context_(std::move(context)), spec_(std::move(spec)), options_(options) {
  spec_.validate();
  if (!spec_.is_consistent())
    throw ProtocolError(ProtocolError::Code::inconsistent_learner,
                        "teaching requires a consistent learner (logreg-ml or 1nn), got '" +
                            to_string(spec_.kind) + "'");
  retrain();
}

TeachingSession TeachingSession::from_scenario(const Scenario &s, const LearnerSpec &spec,
                                               ProtocolOptions options) {
  auto ctx = std::make_shared<TeachingContext>(TeachingContext{s.universe, s.pool});
  return TeachingSession(std::move(ctx), spec, options);
}

std::optional<RequestKind> TeachingSession::pending() const {
  if (phase_ == Phase::done)
    return std::nullopt;
  return pending_;
}

void TeachingSession::retrain() {
  hypothesis_ = fit(spec_, featurize_training_set(features_, training_, context_->universe));
}

std::vector<ObjectId> TeachingSession::training_error_ids() const {
  auto rows = featurize_training_set(features_, training_, context_->universe);
  std::vector<ObjectId> out;
  for (auto i : training_errors(hypothesis_, rows))
    out.push_back(rows.id(i));
  return out;
}

Label TeachingSession::predict(const ObjectId &id) const {
  return prederr::predict(hypothesis_, featurize(features_, context_->universe.at(id)));
}

std::vector<ObjectId> TeachingSession::universe_errors(const TargetOracle &oracle) const {
  std::vector<ObjectId> out;
  for (const auto &o : context_->universe.objects())
    if (prederr::predict(hypothesis_, featurize(features_, o)) != oracle(o.id))
      out.push_back(o.id);
  return out;
}

void TeachingSession::settle() {
  auto errors = training_error_ids();
  events_.push_back({round_, Phase::retrained, std::nullopt, std::nullopt, errors.size()});
  if (errors.empty()) {
    invalidation_.reset();
    phase_ = Phase::await_example;
    pending_ = RequestKind::terminate;
    return;
  }
  std::optional<InvalidationSet> found;
  try {
    found = find_invalidation_set(context_->universe, training_, features_, spec_,
                                  InvalidationMode::exact, options_.invalidation_budget);
  } catch (const BudgetExceeded &) {
    found = find_invalidation_set(context_->universe, training_, features_, spec_,
                                  InvalidationMode::greedy);
  }
  if (!found)
    throw std::logic_error("training errors without an invalidation set");
  invalidation_ = std::move(found);
  phase_ = Phase::await_verdict;
  pending_ = RequestKind::check_labels;
}

void TeachingSession::log(const TeacherResponse &r, Phase before, RequestKind request) {
  events_.push_back({round_, before, request, r, training_error_ids().size()});
}

void TeachingSession::apply(const TeacherResponse &response) {
  using C = ProtocolError::Code;
  if (phase_ == Phase::done)
    throw ProtocolError(C::session_done, "the session is done");
  const RequestKind kind = kind_of(response);
  const bool implicit_continue =
      pending_ == RequestKind::terminate && kind == RequestKind::add_labeled_example;
  if (kind != pending_ && !implicit_continue)
    throw ProtocolError(C::illegal_response, "expected a " + to_string(pending_) +
                                                 " response, got " + to_string(kind));
  const Phase before = phase_;
  const RequestKind request = pending_;

  switch (kind) {
  case RequestKind::terminate: {
    log(response, before, request);
    if (std::get<TerminateResponse>(response).terminate) {
      phase_ = Phase::done;
      outcome_ = Outcome::terminated;
    } else {
      pending_ = RequestKind::add_labeled_example;
    }
    return;
  }
  case RequestKind::add_labeled_example: {
    const auto &r = std::get<AddLabeledExampleResponse>(response);
    if (!context_->universe.contains(r.object_id))
      throw ProtocolError(C::unknown_object, "unknown object '" + r.object_id + "'");
    if (training_.contains(r.object_id))
      throw ProtocolError(C::already_labeled,
                          "object '" + r.object_id + "' is already labeled");
    log(response, before, request);
    ++round_;
    events_.back().round = round_;
    training_.insert(r.object_id, r.label);
    break;
  }
  case RequestKind::check_labels: {
    log(response, before, request);
    if (std::get<CheckLabelsResponse>(response).found_mislabeled) {
      pending_ = RequestKind::correct_labels;
      return;
    }
    bool unused = std::any_of(context_->pool.defs().begin(), context_->pool.defs().end(),
                              [&](const FeatureDef &f) { return !features_.contains(f.id); });
    if (!unused) {
      phase_ = Phase::done;
      outcome_ = Outcome::not_realizable;
    } else {
      pending_ = RequestKind::add_feature;
    }
    return;
  }
  case RequestKind::correct_labels: {
    const auto &r = std::get<CorrectLabelsResponse>(response);
    std::set<ObjectId> seen;
    for (const auto &[id, y] : r.corrections) {
      if (!invalidation_ || !invalidation_->subset.contains(id))
        throw ProtocolError(C::outside_invalidation_set,
                            "object '" + id + "' is not in the invalidation set");
      if (!seen.insert(id).second)
        throw ProtocolError(C::illegal_response, "object '" + id + "' corrected twice");
    }
    log(response, before, request);
    for (const auto &[id, y] : r.corrections)
      training_.relabel(id, y);
    break;
  }
  case RequestKind::add_feature: {
    const auto &r = std::get<AddFeatureResponse>(response);
    const auto *def = context_->pool.find(r.feature_id);
    if (!def)
      throw ProtocolError(C::unknown_feature,
                          "feature '" + r.feature_id + "' is not in the pool");
    if (features_.contains(r.feature_id))
      throw ProtocolError(C::feature_in_use,
                          "feature '" + r.feature_id + "' is already in use");
    log(response, before, request);
    features_ = features_.with(*def);
    break;
  }
  }
  retrain();
  settle();
}

bool operator==(const TeachingSession &a, const TeachingSession &b) {
  auto inv_eq = [](const std::optional<InvalidationSet> &x,
                   const std::optional<InvalidationSet> &y) {
    if (x.has_value() != y.has_value())
      return false;
    return !x || (x->subset == y->subset && x->minimum == y->minimum &&
                  x->bound == y->bound);
  };
  return a.training_ == b.training_ && a.features_.ids() == b.features_.ids() &&
         a.hypothesis_ == b.hypothesis_ && a.phase_ == b.phase_ &&
         a.pending() == b.pending() && a.round_ == b.round_ &&
         a.outcome_ == b.outcome_ && inv_eq(a.invalidation_, b.invalidation_) &&
         a.events_ == b.events_;
}

TeachingSession step(TeachingSession session, const TeacherResponse &response) {
  session.apply(response);
  return session;
}

TeachingSession replay(std::shared_ptr<const TeachingContext> context,
                       const LearnerSpec &spec, const std::vector<ProtocolEvent> &events,
                       ProtocolOptions options) {
  TeachingSession session(std::move(context), spec, options);
  for (const auto &e : events) {
    if (e.phase == Phase::retrained)
      continue;
    if (!e.response)
      throw ProtocolError(ProtocolError::Code::malformed_event,
                          "event without a response outside the retrained phase");
    session.apply(*e.response);
  }
  if (session.events() != events)
    throw ProtocolError(ProtocolError::Code::malformed_event,
                        "replay diverged from the recorded event log");
  return session;
}

// ---------------------------------------------------------------------------
// JSON

json response_to_json(const TeacherResponse &r) {
  json j;
  j["kind"] = to_string(kind_of(r));
  std::visit(
      [&](const auto &v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TerminateResponse>) {
          j["terminate"] = v.terminate;
        } else if constexpr (std::is_same_v<T, AddLabeledExampleResponse>) {
          j["object_id"] = v.object_id;
          j["label"] = to_int(v.label);
        } else if constexpr (std::is_same_v<T, CheckLabelsResponse>) {
          j["found_mislabeled"] = v.found_mislabeled;
        } else if constexpr (std::is_same_v<T, CorrectLabelsResponse>) {
          json list = json::array();
          for (const auto &[id, y] : v.corrections)
            list.push_back(json::array({id, to_int(y)}));
          j["corrections"] = std::move(list);
        } else {
          j["feature_id"] = v.feature_id;
        }
      },
      r);
  return j;
}

namespace {

[[noreturn]] void malformed(const std::string &what) {
  throw ProtocolError(ProtocolError::Code::malformed_event, what);
}

const json &field(const json &j, const char *key) {
  if (!j.is_object() || !j.contains(key))
    malformed(std::string("missing field '") + key + "'");
  return j.at(key);
}

Label label_field(const json &v) {
  if (!v.is_number_integer() || (v.get<long long>() != 0 && v.get<long long>() != 1))
    malformed("label must be 0 or 1");
  return label_from_int(v.get<long long>());
}

std::string string_field(const json &v, const char *what) {
  if (!v.is_string())
    malformed(std::string(what) + " must be a string");
  return v.get<std::string>();
}

bool bool_field(const json &v, const char *what) {
  if (!v.is_boolean())
    malformed(std::string(what) + " must be a boolean");
  return v.get<bool>();
}

} // namespace

TeacherResponse response_from_json(const json &j) {
  auto kind = request_kind_from_string(string_field(field(j, "kind"), "kind"));
  switch (kind) {
  case RequestKind::terminate:
    return TerminateResponse{bool_field(field(j, "terminate"), "terminate")};
  case RequestKind::add_labeled_example:
    return AddLabeledExampleResponse{string_field(field(j, "object_id"), "object_id"),
                                     label_field(field(j, "label"))};
  case RequestKind::check_labels:
    return CheckLabelsResponse{
        bool_field(field(j, "found_mislabeled"), "found_mislabeled")};
  case RequestKind::correct_labels: {
    const auto &list = field(j, "corrections");
    if (!list.is_array())
      malformed("corrections must be an array");
    CorrectLabelsResponse r;
    for (const auto &pair : list) {
      if (!pair.is_array() || pair.size() != 2)
        malformed("each correction must be [object-id, label]");
      r.corrections.emplace_back(string_field(pair[0], "object id"),
                                 label_field(pair[1]));
    }
    return r;
  }
  case RequestKind::add_feature:
    return AddFeatureResponse{string_field(field(j, "feature_id"), "feature_id")};
  }
  malformed("unknown response kind");
}

json event_to_json(const ProtocolEvent &e) {
  json j;
  j["round"] = e.round;
  j["phase"] = to_string(e.phase);
  j["request"] = e.request ? json(to_string(*e.request)) : json(nullptr);
  j["response"] = e.response ? response_to_json(*e.response) : json(nullptr);
  j["training_error_count"] = e.training_error_count;
  return j;
}

ProtocolEvent event_from_json(const json &j) {
  ProtocolEvent e;
  const auto &round = field(j, "round");
  if (!round.is_number_unsigned() && !round.is_number_integer())
    malformed("round must be a non-negative integer");
  e.round = round.get<std::uint64_t>();
  e.phase = phase_from_string(string_field(field(j, "phase"), "phase"));
  const auto &req = field(j, "request");
  if (!req.is_null())
    e.request = request_kind_from_string(string_field(req, "request"));
  const auto &resp = field(j, "response");
  if (!resp.is_null())
    e.response = response_from_json(resp);
  const auto &count = field(j, "training_error_count");
  if (!count.is_number_unsigned() && !count.is_number_integer())
    malformed("training_error_count must be a non-negative integer");
  e.training_error_count = count.get<std::size_t>();
  return e;
}

std::string events_to_jsonl(const std::vector<ProtocolEvent> &events) {
  std::string out;
  for (const auto &e : events)
    out += event_to_json(e).dump() + "\n";
  return out;
}

std::vector<ProtocolEvent> events_from_jsonl(const std::string &text) {
  std::vector<ProtocolEvent> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      out.push_back(event_from_json(json::parse(line)));
    } catch (const json::exception &e) {
      malformed("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ProtocolError &e) {
      malformed("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracle teacher

OracleTeacher::OracleTeacher(Scenario scenario) : scenario_(std::move(scenario)) {}

TeacherResponse OracleTeacher::respond(const TeachingSession &session) {
  const auto pending = session.pending();
  if (!pending)
    throw std::logic_error("the session is done");
  const auto &oracle = scenario_.oracle;
  const auto &universe = session.context().universe;
  const auto &training = session.training();

  auto unlabeled = [&] {
    std::vector<ObjectId> out;
    for (const auto &o : universe.objects())
      if (!training.contains(o.id))
        out.push_back(o.id);
    return out;
  };

  switch (*pending) {
  case RequestKind::terminate:
    return TerminateResponse{session.universe_errors(oracle).empty() || unlabeled().empty()};
  case RequestKind::add_labeled_example: {
    for (const auto &[id, y] : scenario_.initial_training)
      if (!training.contains(id))
        return AddLabeledExampleResponse{id, y};
    auto rest = unlabeled();
    if (rest.empty())
      throw std::logic_error("no unlabeled object left to add");
    for (const auto &id : rest)
      if (session.predict(id) != oracle(id))
        return AddLabeledExampleResponse{id, oracle(id)};
    return AddLabeledExampleResponse{rest.front(), oracle(rest.front())};
  }
  case RequestKind::check_labels: {
    const auto &inv = session.invalidation_set();
    bool found = inv && std::any_of(inv->subset.begin(), inv->subset.end(),
                                    [&](const auto &ex) { return ex.second != oracle(ex.first); });
    return CheckLabelsResponse{found};
  }
  case RequestKind::correct_labels: {
    CorrectLabelsResponse r;
    if (const auto &inv = session.invalidation_set())
      for (const auto &[id, y] : inv->subset)
        if (y != oracle(id))
          r.corrections.emplace_back(id, oracle(id));
    return r;
  }
  case RequestKind::add_feature: {
    std::vector<const FeatureDef *> unused;
    for (const auto &f : session.context().pool.defs())
      if (!session.features().contains(f.id))
        unused.push_back(&f);
    if (unused.empty())
      throw std::logic_error("feature pool exhausted");
    if (const auto &inv = session.invalidation_set())
      for (const auto *f : unused) {
        auto rows = featurize_training_set(session.features().with(*f), inv->subset, universe);
        if (is_realizable(rows, session.spec().kind))
          return AddFeatureResponse{f->id};
      }
    return AddFeatureResponse{unused.front()->id};
  }
  }
  throw std::logic_error("unhandled request");
}

TeachingRun run_with_oracle_teacher(const Scenario &scenario, const LearnerSpec &spec,
                                    std::uint64_t max_rounds, ProtocolOptions options) {
  auto session = TeachingSession::from_scenario(scenario, spec, options);
  OracleTeacher teacher(scenario);
  while (session.phase() != Phase::done) {
    auto response = teacher.respond(session);
    if (session.pending() == RequestKind::terminate && session.round() >= max_rounds &&
        !std::get<TerminateResponse>(response).terminate)
      break;
    session.apply(response);
  }
  const bool done = session.phase() == Phase::done;
  const bool zero = session.universe_errors(scenario.oracle).empty();
  return {std::move(session), done, zero};
}

} // namespace prederr
