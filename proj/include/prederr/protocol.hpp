#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "prederr/domain.hpp"
#include "prederr/invalidation.hpp"
#include "prederr/learners.hpp"
#include "prederr/scenarios.hpp"

namespace prederr {

enum class Phase { await_example, retrained, await_verdict, done };
enum class RequestKind {
  terminate,
  add_labeled_example,
  check_labels,
  correct_labels,
  add_feature
};
enum class Outcome { running, terminated, not_realizable };

std::string to_string(Phase p);
std::string to_string(RequestKind r);
std::string to_string(Outcome o);
Phase phase_from_string(const std::string &s);
RequestKind request_kind_from_string(const std::string &s);

struct TerminateResponse {
  bool terminate = false;
  bool operator==(const TerminateResponse &) const = default;
};
struct AddLabeledExampleResponse {
  ObjectId object_id;
  Label label = Label::zero;
  bool operator==(const AddLabeledExampleResponse &) const = default;
};
struct CheckLabelsResponse {
  bool found_mislabeled = false;
  bool operator==(const CheckLabelsResponse &) const = default;
};
struct CorrectLabelsResponse {
  std::vector<Example> corrections;
  bool operator==(const CorrectLabelsResponse &) const = default;
};
struct AddFeatureResponse {
  FeatureId feature_id;
  bool operator==(const AddFeatureResponse &) const = default;
};

using TeacherResponse =
    std::variant<TerminateResponse, AddLabeledExampleResponse, CheckLabelsResponse,
                 CorrectLabelsResponse, AddFeatureResponse>;

RequestKind kind_of(const TeacherResponse &r);

class ProtocolError : public std::runtime_error {
public:
  enum class Code {
    illegal_response,
    session_done,
    unknown_object,
    already_labeled,
    outside_invalidation_set,
    unknown_feature,
    feature_in_use,
    inconsistent_learner,
    malformed_event,
  };
  ProtocolError(Code code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

private:
  Code code_;
};

std::string to_string(ProtocolError::Code c);

struct ProtocolEvent {
  std::uint64_t round = 0;
  Phase phase = Phase::await_example;
  // Absent on the derived "retrained" events.
  std::optional<RequestKind> request;
  std::optional<TeacherResponse> response;
  std::size_t training_error_count = 0;

  bool operator==(const ProtocolEvent &) const = default;
};

struct TeachingContext {
  ObjectUniverse universe;
  FeaturePool pool;
};

struct ProtocolOptions {
  // Exact invalidation search budget; greedy shrinking is used beyond it.
  std::uint64_t invalidation_budget = 200'000;
};

// Error-driven teaching as a state machine. T and F start empty; every
// teacher answer is validated before anything changes.
class TeachingSession {
public:
  TeachingSession(std::shared_ptr<const TeachingContext> context, LearnerSpec spec,
                  ProtocolOptions options = {});
  static TeachingSession from_scenario(const Scenario &s, const LearnerSpec &spec,
                                       ProtocolOptions options = {});

  void apply(const TeacherResponse &response);

  const TeachingContext &context() const { return *context_; }
  std::shared_ptr<const TeachingContext> shared_context() const { return context_; }
  const LearnerSpec &spec() const { return spec_; }
  const ProtocolOptions &options() const { return options_; }
  const TrainingSet &training() const { return training_; }
  const FeatureSet &features() const { return features_; }
  const Hypothesis &hypothesis() const { return hypothesis_; }
  Phase phase() const { return phase_; }
  std::optional<RequestKind> pending() const;
  std::uint64_t round() const { return round_; }
  Outcome outcome() const { return outcome_; }
  const std::optional<InvalidationSet> &invalidation_set() const { return invalidation_; }
  const std::vector<ProtocolEvent> &events() const { return events_; }

  std::vector<ObjectId> training_error_ids() const;
  Label predict(const ObjectId &id) const;
  // Objects of the universe the current classifier gets wrong under `oracle`.
  std::vector<ObjectId> universe_errors(const TargetOracle &oracle) const;

  // Same state; context compared by value.
  friend bool operator==(const TeachingSession &a, const TeachingSession &b);

private:
  void retrain();
  void settle();
  void log(const TeacherResponse &r, Phase before, RequestKind request);

  std::shared_ptr<const TeachingContext> context_;
  LearnerSpec spec_;
  ProtocolOptions options_;
  TrainingSet training_;
  FeatureSet features_;
  Hypothesis hypothesis_;
  Phase phase_ = Phase::await_example;
  RequestKind pending_ = RequestKind::terminate;
  std::uint64_t round_ = 0;
  Outcome outcome_ = Outcome::running;
  std::optional<InvalidationSet> invalidation_;
  std::vector<ProtocolEvent> events_;
};

// Functional form of TeachingSession::apply.
TeachingSession step(TeachingSession session, const TeacherResponse &response);

// Fresh session with every non-derived event applied in order; the derived
// events must match what the replay produces.
TeachingSession replay(std::shared_ptr<const TeachingContext> context,
                       const LearnerSpec &spec, const std::vector<ProtocolEvent> &events,
                       ProtocolOptions options = {});

nlohmann::json response_to_json(const TeacherResponse &r);
TeacherResponse response_from_json(const nlohmann::json &j);
nlohmann::json event_to_json(const ProtocolEvent &e);
ProtocolEvent event_from_json(const nlohmann::json &j);
std::string events_to_jsonl(const std::vector<ProtocolEvent> &events);
std::vector<ProtocolEvent> events_from_jsonl(const std::string &text);

class Teacher {
public:
  virtual ~Teacher() = default;
  virtual TeacherResponse respond(const TeachingSession &session) = 0;
};

// Answers from the target labeling: replays the scenario's initial training
// examples first (labels as given), then adds misclassified objects with
// their true labels; checks and corrects labels exactly; adds the first
// unused feature that makes the invalidation set realizable.
class OracleTeacher : public Teacher {
public:
  explicit OracleTeacher(Scenario scenario);
  TeacherResponse respond(const TeachingSession &session) override;

private:
  Scenario scenario_;
};

struct TeachingRun {
  TeachingSession session;
  bool done = false;
  bool zero_errors = false;
};

TeachingRun run_with_oracle_teacher(const Scenario &scenario, const LearnerSpec &spec,
                                    std::uint64_t max_rounds,
                                    ProtocolOptions options = {});

} // namespace prederr
