#include "doctest.h"

#include <string>

#include "prederr/invalidation.hpp"
#include "prederr/scenarios.hpp"
#include "prederr/separability.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace prederr;

namespace {

void check_strict_subsets_fail(const Scenario &s, const InvalidationSet &inv,
                               const FeatureSet &f, const LearnerSpec &spec) {
  const auto n = static_cast<std::uint32_t>(inv.cardinality());
  for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask)
    CHECK_FALSE(verify_invalidation(s.universe, oracle::masked(inv.subset, mask), f, spec));
}

} // namespace

TEST_CASE("XOR has an invalidation set of four") {
  auto s = gen_xor();
  auto inv = find_invalidation_set(s.universe, s.training(), s.features(), LearnerSpec::logreg_ml());
  REQUIRE(inv);
  CHECK(inv->cardinality() == 4);
  CHECK(inv->bound == 4);
  CHECK(inv->minimum);
  CHECK(verify_invalidation(s.universe, inv->subset, s.features(), LearnerSpec::logreg_ml()));
  check_strict_subsets_fail(s, *inv, s.features(), LearnerSpec::logreg_ml());
}

TEST_CASE("coincident conflicting pair under 1NN has an invalidation set of two") {
  auto s = gen_collision_fixture();
  auto inv = find_invalidation_set(s.universe, s.training(), s.features(), LearnerSpec::one_nn());
  REQUIRE(inv);
  CHECK(inv->cardinality() == 2);
  CHECK(inv->bound == 2);
  CHECK(inv->subset.ids() == std::vector<ObjectId>{"v1", "v2"});
}

TEST_CASE("without features any two labels form an invalidation set") {
  auto u = support::universe({{"x1", {{"a", 5}}}, {"x2", {{"a", 7}}}});
  TrainingSet t({{"x1", Label::one}, {"x2", Label::zero}});
  for (auto spec : {LearnerSpec::logreg_ml(), LearnerSpec::one_nn()}) {
    auto inv = find_invalidation_set(u, t, FeatureSet{}, spec);
    REQUIRE(inv);
    CHECK(inv->cardinality() == 2);
    CHECK(inv->cardinality() <= invalidation_bound(spec, 0, 2));
  }
}

TEST_CASE("verification of candidate sets") {
  auto s = gen_xor();
  CHECK(verify_invalidation(s.universe, s.training(), s.features(), LearnerSpec::logreg_ml()));
  for (const auto &[id, y] : s.training()) {
    TrainingSet single({{id, y}});
    CHECK_FALSE(verify_invalidation(s.universe, single, s.features(), LearnerSpec::logreg_ml()));
    CHECK_FALSE(verify_invalidation(s.universe, single, s.features(), LearnerSpec::one_nn()));
  }
  auto sep = gen_separable(20, 2, 0.1, 5);
  CHECK_FALSE(verify_invalidation(sep.universe, sep.training(), sep.features(), LearnerSpec::logreg_ml()));
  CHECK_FALSE(find_invalidation_set(sep.universe, sep.training(), sep.features(),
                                    LearnerSpec::logreg_ml()));
}

TEST_CASE("bounds by learner") {
  CHECK(invalidation_bound(LearnerSpec::logreg_ml(), 3, 40) == 5);
  CHECK(invalidation_bound(LearnerSpec::one_nn(), 3, 40) == 2);
  CHECK(invalidation_bound(LearnerSpec::logreg_reg(1.0), 3, 40) == 40);
  CHECK(invalidation_bound(LearnerSpec::knn(3), 3, 40) == 40);
  CHECK(to_string(InvalidationMode::greedy) == "greedy");
  CHECK(invalidation_mode_from_string("exact") == InvalidationMode::exact);
}

TEST_CASE("exact invalidation sets are minimum against exhaustive search") {
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    std::size_t n = 5 + seed % 4;
    auto s = inject_mislabels(gen_random_points(n, 1 + seed % 2, seed), 0.1, seed);
    for (auto spec : {LearnerSpec::logreg_ml(), LearnerSpec::one_nn()}) {
      auto inv = find_invalidation_set(s.universe, s.training(), s.features(), spec);
      auto best = oracle::min_invalidation_size(s.universe, s.training(), s.features(), spec);
      if (!inv) {
        CHECK_FALSE(verify_invalidation(s.universe, s.training(), s.features(), spec));
        continue;
      }
      REQUIRE(best);
      CHECK(inv->cardinality() == *best);
      CHECK(inv->cardinality() <= inv->bound);
      CHECK(verify_invalidation(s.universe, inv->subset, s.features(), spec));
      ++compared;
    }
  }
  CHECK(compared > 20);
}

TEST_CASE("for maximum likelihood an invalidation set is a non-separable set") {
  for (int t = 0; t < 40; ++t) {
    auto s = gen_random_points(6, 2, 100 + t);
    auto rows = featurize_training_set(s.features(), s.training(), s.universe);
    bool separable = strictly_separable(rows).separable;
    CHECK(verify_invalidation(s.universe, s.training(), s.features(), LearnerSpec::logreg_ml()) ==
          !separable);
  }
}

TEST_CASE("greedy mode returns an inclusion-minimal set") {
  auto s = gen_random_points(14, 2, 9);
  auto spec = LearnerSpec::logreg_ml();
  auto inv = find_invalidation_set(s.universe, s.training(), s.features(), spec,
                                   InvalidationMode::greedy);
  REQUIRE(inv);
  CHECK_FALSE(inv->minimum);
  CHECK(verify_invalidation(s.universe, inv->subset, s.features(), spec));
  for (const auto &id : inv->subset.ids()) {
    std::vector<ObjectId> rest;
    for (const auto &other : inv->subset.ids())
      if (other != id)
        rest.push_back(other);
    CHECK_FALSE(verify_invalidation(s.universe, inv->subset.subset(rest), s.features(), spec));
  }
}

TEST_CASE("exact mode over budget advises greedy mode") {
  auto s = gen_random_points(40, 3, 2);
  auto spec = LearnerSpec::logreg_reg(5.0);
  auto rows = featurize_training_set(s.features(), s.training(), s.universe);
  REQUIRE_FALSE(training_errors(fit(spec, rows), rows).empty());
  try {
    find_invalidation_set(s.universe, s.training(), s.features(), spec, InvalidationMode::exact, 50);
    FAIL("expected the budget to be exceeded");
  } catch (const BudgetExceeded &e) {
    CHECK(std::string(e.what()).find("greedy") != std::string::npos);
  }
}
