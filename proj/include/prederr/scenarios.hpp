#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "prederr/domain.hpp"
#include "prederr/hypothesis.hpp"

namespace prederr {

struct Scenario {
  std::string name;
  ObjectUniverse universe;
  TargetOracle oracle;
  FeaturePool pool;
  // Order matters: an oracle teacher presents these examples in this order.
  std::vector<Example> initial_training;
  std::vector<FeatureId> initial_features;
  std::uint64_t seed = 0;
  // Objects whose initial label was deliberately flipped.
  std::vector<ObjectId> flipped;
  // Generating hyperplane (unit w) of separable scenarios.
  std::optional<LinearHypothesis> planted;

  TrainingSet training() const { return TrainingSet(initial_training); }
  FeatureSet features() const { return FeatureSet::from_pool(pool, initial_features); }
};

// Seeded generator used by every fixture: mt19937_64 with uniform doubles
// taken from the top 53 bits, so fixtures do not depend on the standard
// library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

private:
  std::mt19937_64 engine_;
};

// Four objects at (a, b) in {0,1}^2 labeled a xor b; pool {a, b, ab = a*b};
// initial features [a, b].
Scenario gen_xor();

// XOR without the product feature in the pool: never realizable.
Scenario gen_xor_without_product();

// n points in [-1,1]^d at distance >= margin from a random hyperplane through
// the origin, labeled by its side. Pool and initial features are the
// coordinate projections x1..xd.
Scenario gen_separable(std::size_t n, std::size_t d, double margin,
                       std::uint64_t seed);

// n points in [0,1]^d with independent fair-coin labels, distinct positions.
Scenario gen_random_points(std::size_t n, std::size_t d, std::uint64_t seed);

// Flips ceil(rate * n) labels of the initial training set.
Scenario inject_mislabels(const Scenario &s, double rate, std::uint64_t seed);

// Adds `count` new objects duplicating the attributes of existing training
// objects with the opposite target label, and trains on them.
Scenario inject_collisions(const Scenario &s, std::size_t count,
                           std::uint64_t seed);

// Drops one feature from the initial feature set (the pool keeps it).
Scenario drop_initial_feature(const Scenario &s, const FeatureId &feature);

// Two tight clusters and one low-margin positive near the negative cluster:
// separable, but the penalty makes regularized fits sacrifice that point.
Scenario gen_figure1();

// Two objects at the same point with opposite labels, among separable others.
Scenario gen_collision_fixture();

Scenario gen_empty();

std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string &name);

class ScenarioError : public std::runtime_error {
public:
  ScenarioError(const std::string &what, std::string pointer)
      : std::runtime_error(pointer.empty() ? what : pointer + ": " + what),
        pointer_(std::move(pointer)) {}
  // JSON pointer (or "byte N" for syntax errors) locating the problem.
  const std::string &pointer() const { return pointer_; }

private:
  std::string pointer_;
};

nlohmann::json scenario_to_json(const Scenario &s);
Scenario scenario_from_json(const nlohmann::json &j);

std::string dump_scenario(const Scenario &s);
Scenario parse_scenario(const std::string &text);
Scenario load_scenario(const std::string &path);
void save_scenario(const Scenario &s, const std::string &path);

} // namespace prederr
