#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "prederr/domain.hpp"
#include "prederr/hypothesis.hpp"
#include "prederr/subset_search.hpp"

namespace prederr {

using Point = std::vector<double>;

class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct SeparabilityVerdict {
  bool separable = false;
  // Present iff separable: w.p + b >= 1 on positives, <= -1 on negatives.
  std::optional<LinearHypothesis> witness;
};

inline constexpr double kSeparabilityTolerance = 1e-9;

// Strict linear separability of two finite point sets: phase-one feasibility
// of w.p + b >= 1 (positives), w.q + b <= -1 (negatives) after mapping the
// points onto the unit bounding box. Empty P or N is separable.
SeparabilityVerdict strictly_separable(std::span<const Point> positives,
                                       std::span<const Point> negatives);

// Label-one rows against label-zero rows (all rows, or only `subset`).
SeparabilityVerdict strictly_separable(const FeaturizedTrainingSet &rows);
bool rows_separable(const FeaturizedTrainingSet &rows,
                    std::span<const std::size_t> subset);

inline constexpr std::size_t kHullOracleMaxPoints = 12;
inline constexpr std::size_t kHullOracleMaxDim = 3;

class OracleCapExceeded : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Brute-force test of conv(P) and conv(N) intersecting: enumerates supports
// of basic solutions of the convex-combination system and solves each small
// system directly. No simplex involved; meant as an independent cross-check.
bool hulls_intersect(std::span<const Point> positives,
                     std::span<const Point> negatives);

struct LabeledPoint {
  ObjectId id;
  Point x;
  Label y;
};

struct KirchbergerWitness {
  std::vector<ObjectId> ids;
  // False when the exact search was over budget and the witness is only
  // inclusion-minimal.
  bool minimum = true;
};

// Minimum-cardinality non-separable subset (at most d + 2 points), ordered by
// size then lexicographic object id; none when the whole set is separable.
std::optional<KirchbergerWitness>
kirchberger_witness(std::span<const LabeledPoint> points, std::size_t dim,
                    std::uint64_t budget = kDefaultSubsetBudget);

std::optional<KirchbergerWitness>
kirchberger_witness(const FeaturizedTrainingSet &rows,
                    std::uint64_t budget = kDefaultSubsetBudget);

} // namespace prederr
