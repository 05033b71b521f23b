#include "doctest.h"

#include <memory>

#include "prederr/diagnosis.hpp"
#include "prederr/protocol.hpp"
#include "prederr/scenarios.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace prederr;

namespace {

using Code = ProtocolError::Code;

Code code_of(TeachingSession &s, const TeacherResponse &r) {
  try {
    s.apply(r);
  } catch (const ProtocolError &e) {
    return e.code();
  }
  FAIL("expected a protocol error");
  return Code::malformed_event;
}

AddLabeledExampleResponse add(const ObjectId &id, int y) { return {id, label_from_int(y)}; }

// 1-D line: a=0, b=1 negative; c=2, d=3 positive.
Scenario line_scenario() {
  Scenario s;
  s.name = "line";
  s.universe = support::universe({{"a", {{"x", 0}}}, {"b", {{"x", 1}}}, {"c", {{"x", 2}}}, {"d", {{"x", 3}}}});
  s.oracle = TargetOracle({{"a", Label::zero}, {"b", Label::zero}, {"c", Label::one}, {"d", Label::one}});
  s.pool = FeaturePool({support::feature("x", "x")});
  return s;
}

} // namespace

TEST_CASE("a single example never leaves a training error") {
  auto s = TeachingSession::from_scenario(gen_xor(), LearnerSpec::logreg_ml());
  CHECK(s.phase() == Phase::await_example);
  CHECK(s.pending() == RequestKind::terminate);
  s.apply(TerminateResponse{false});
  CHECK(s.pending() == RequestKind::add_labeled_example);
  s.apply(add("x1", 1));
  CHECK(s.training_error_ids().empty());
  CHECK(s.phase() == Phase::await_example);
  CHECK(s.round() == 1);
  REQUIRE(s.events().size() == 3);
  CHECK(s.events()[2].phase == Phase::retrained);
  CHECK_FALSE(s.events()[2].request);
}

TEST_CASE("a mislabel is flagged through the invalidation set and corrected") {
  auto sc = line_scenario();
  auto s = TeachingSession::from_scenario(sc, LearnerSpec::logreg_ml());
  s.apply(add("a", 0));
  s.apply(add("c", 1));
  REQUIRE(s.phase() == Phase::await_verdict);
  CHECK(s.pending() == RequestKind::check_labels);
  REQUIRE(s.invalidation_set());
  CHECK(s.invalidation_set()->cardinality() == 2);
  s.apply(CheckLabelsResponse{false});
  CHECK(s.pending() == RequestKind::add_feature);
  s.apply(AddFeatureResponse{"x"});
  CHECK(s.phase() == Phase::await_example);
  CHECK(s.training_error_ids().empty());

  s.apply(add("d", 0));
  REQUIRE(s.phase() == Phase::await_verdict);
  REQUIRE(s.invalidation_set());
  CHECK(s.invalidation_set()->subset.ids() == std::vector<ObjectId>{"a", "c", "d"});
  CHECK(code_of(s, CorrectLabelsResponse{{{"d", Label::one}}}) == Code::illegal_response);
  s.apply(CheckLabelsResponse{true});
  CHECK(s.pending() == RequestKind::correct_labels);
  CHECK(code_of(s, CorrectLabelsResponse{{{"b", Label::one}}}) == Code::outside_invalidation_set);
  CHECK(code_of(s, CorrectLabelsResponse{{{"d", Label::one}, {"d", Label::one}}}) ==
        Code::illegal_response);
  s.apply(CorrectLabelsResponse{{{"d", Label::one}}});
  CHECK(s.phase() == Phase::await_example);
  CHECK(s.training_error_ids().empty());
  CHECK(s.training().label_of("d") == Label::one);
}

TEST_CASE("XOR needs the product feature") {
  auto s = TeachingSession::from_scenario(gen_xor(), LearnerSpec::logreg_ml());
  s.apply(add("x1", 0));
  s.apply(add("x2", 1));
  s.apply(CheckLabelsResponse{false});
  s.apply(AddFeatureResponse{"a"});
  s.apply(add("x3", 0));
  REQUIRE(s.phase() == Phase::await_verdict);
  s.apply(CheckLabelsResponse{false});
  s.apply(AddFeatureResponse{"b"});
  CHECK(s.training_error_ids().empty());
  s.apply(add("x4", 1));
  REQUIRE(s.phase() == Phase::await_verdict);
  REQUIRE(s.invalidation_set());
  CHECK(s.invalidation_set()->cardinality() == 4);
  s.apply(CheckLabelsResponse{false});
  CHECK(code_of(s, AddFeatureResponse{"a"}) == Code::feature_in_use);
  CHECK(code_of(s, AddFeatureResponse{"zz"}) == Code::unknown_feature);
  s.apply(AddFeatureResponse{"ab"});
  CHECK(s.phase() == Phase::await_example);
  CHECK(s.training_error_ids().empty());
  CHECK(s.universe_errors(gen_xor().oracle).empty());
  s.apply(TerminateResponse{true});
  CHECK(s.phase() == Phase::done);
  CHECK(s.outcome() == Outcome::terminated);
  CHECK(code_of(s, TerminateResponse{false}) == Code::session_done);
}

TEST_CASE("illegal responses leave the session untouched") {
  auto s = TeachingSession::from_scenario(gen_xor(), LearnerSpec::logreg_ml());
  s.apply(add("x1", 0));
  auto before = s;
  CHECK(code_of(s, CheckLabelsResponse{true}) == Code::illegal_response);
  CHECK(code_of(s, add("x1", 1)) == Code::already_labeled);
  CHECK(code_of(s, add("nobody", 1)) == Code::unknown_object);
  CHECK(code_of(s, AddFeatureResponse{"a"}) == Code::illegal_response);
  CHECK(s == before);
}

TEST_CASE("inconsistent learners are rejected") {
  try {
    TeachingSession::from_scenario(gen_xor(), LearnerSpec::logreg_reg(1.0));
    FAIL("expected rejection");
  } catch (const ProtocolError &e) {
    CHECK(e.code() == Code::inconsistent_learner);
    CHECK(std::string(e.what()).find("consistent") != std::string::npos);
  }
  CHECK_THROWS_AS(TeachingSession::from_scenario(gen_xor(), LearnerSpec::knn(3)), ProtocolError);
}

TEST_CASE("exhausted feature pool ends the session as not realizable") {
  auto run = run_with_oracle_teacher(gen_xor_without_product(), LearnerSpec::logreg_ml(), 100);
  CHECK(run.done);
  CHECK(run.session.outcome() == Outcome::not_realizable);
  CHECK_FALSE(run.zero_errors);
}

TEST_CASE("oracle teacher on XOR") {
  auto sc = gen_xor();
  auto run = run_with_oracle_teacher(sc, LearnerSpec::logreg_ml(), 40);
  CHECK(run.done);
  CHECK(run.zero_errors);
  CHECK(run.session.outcome() == Outcome::terminated);
  CHECK(run.session.features().contains("ab"));
  CHECK(run.session.universe_errors(sc.oracle).empty());
}

TEST_CASE("empty scenario terminates immediately") {
  auto run = run_with_oracle_teacher(gen_empty(), LearnerSpec::logreg_ml(), 10);
  CHECK(run.done);
  CHECK(run.zero_errors);
  CHECK(run.session.events().size() == 1);
}

TEST_CASE("oracle teacher corrects the mislabels it is shown") {
  auto sc = builtin_scenario("separable-mislabeled");
  auto run = run_with_oracle_teacher(sc, LearnerSpec::logreg_ml(), 10 * sc.universe.size());
  CHECK(run.done);
  for (const auto &[id, y] : run.session.training())
    if (y != sc.oracle(id))
      CHECK(training_errors(run.session.hypothesis(),
                            featurize_training_set(run.session.features(), run.session.training(),
                                                   sc.universe))
                .empty());
}

TEST_CASE("replay and JSON lines reproduce the session") {
  for (const auto &sc : {gen_xor(), builtin_scenario("separable-mislabeled"), line_scenario()}) {
    auto spec = LearnerSpec::logreg_ml();
    auto run = run_with_oracle_teacher(sc, spec, 200);
    const auto &events = run.session.events();
    auto again = replay(run.session.shared_context(), spec, events);
    CHECK(again == run.session);
    auto parsed = events_from_jsonl(events_to_jsonl(events));
    CHECK(parsed == events);
    CHECK(replay(run.session.shared_context(), spec, parsed) == run.session);
  }
  auto run = run_with_oracle_teacher(gen_xor(), LearnerSpec::logreg_ml(), 40);
  auto events = run.session.events();
  events[3].training_error_count += 1;
  CHECK_THROWS_AS(replay(run.session.shared_context(), LearnerSpec::logreg_ml(), events),
                  ProtocolError);
  CHECK_THROWS_AS(events_from_jsonl("{\"round\": 0}\n"), ProtocolError);
}

TEST_CASE("awaiting an example implies zero training errors and no learner errors") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto sc = inject_mislabels(gen_separable(16, 2, 0.1, seed), 0.15, seed);
    for (auto spec : {LearnerSpec::logreg_ml(), LearnerSpec::one_nn()}) {
      OracleTeacher teacher(sc);
      auto s = TeachingSession::from_scenario(sc, spec);
      for (int i = 0; i < 400 && s.phase() != Phase::done; ++i) {
        if (s.phase() == Phase::await_example)
          CHECK(s.training_error_ids().empty());
        if (s.phase() == Phase::await_verdict) {
          DiagnosisContext ctx{sc.universe, sc.oracle};
          auto d = classify_training_error(ctx, s.training(), s.features(), spec);
          if (d)
            CHECK(d->category != ErrorCategory::learner);
        }
        s.apply(teacher.respond(s));
      }
      CHECK(s.phase() == Phase::done);
    }
  }
}

TEST_CASE("inner loop makes lexicographic progress") {
  auto sc = inject_mislabels(gen_separable(20, 2, 0.1, 3), 0.2, 4);
  OracleTeacher teacher(sc);
  auto s = TeachingSession::from_scenario(sc, LearnerSpec::logreg_ml());
  auto measure = [&] {
    std::size_t wrong = 0;
    for (const auto &[id, y] : s.training())
      wrong += y != sc.oracle(id);
    return std::pair{wrong, sc.pool.size() - s.features().dim()};
  };
  while (s.phase() != Phase::done) {
    bool in_loop = s.pending() == RequestKind::check_labels;
    auto before = measure();
    s.apply(teacher.respond(s));
    if (in_loop) {
      if (s.pending() == RequestKind::correct_labels || s.pending() == RequestKind::add_feature)
        s.apply(teacher.respond(s));
      if (s.phase() != Phase::done)
        CHECK(measure() < before);
    }
  }
}

TEST_CASE("response JSON round trip") {
  std::vector<TeacherResponse> all{TerminateResponse{true}, add("x", 1), CheckLabelsResponse{true},
                                   CorrectLabelsResponse{{{"x", Label::zero}}},
                                   AddFeatureResponse{"f"}};
  for (const auto &r : all)
    CHECK(response_from_json(response_to_json(r)) == r);
  CHECK_THROWS_AS(response_from_json(nlohmann::json{{"kind", "add_labeled_example"}}), ProtocolError);
  CHECK(kind_of(AddFeatureResponse{"f"}) == RequestKind::add_feature);
  CHECK(phase_from_string(to_string(Phase::await_verdict)) == Phase::await_verdict);
}
