#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "prederr/domain.hpp"
#include "prederr/learners.hpp"
#include "prederr/subset_search.hpp"

namespace prederr {

enum class InvalidationMode { exact, greedy };

std::string to_string(InvalidationMode m);
InvalidationMode invalidation_mode_from_string(const std::string &name);

struct InvalidationSet {
  TrainingSet subset;
  // True for exact mode: no smaller subset of T is an invalidation set.
  bool minimum = true;
  // Upper bound on the size of a minimum invalidation set for this learner.
  std::size_t bound = 0;

  std::size_t cardinality() const { return subset.size(); }
};

// Largest size an exact search has to look at: |F| + 2 for maximum-likelihood
// logistic regression, 2 for 1NN and |T| for every other learner.
std::size_t invalidation_bound(const LearnerSpec &spec, std::size_t feature_count,
                               std::size_t training_size);

// Smallest subset S of T on which the learner trained on S errs on S. Subsets
// are tried by size, then in lexicographic order of their sorted ids. Empty
// when T itself has no training error.
std::optional<InvalidationSet>
find_invalidation_set(const ObjectUniverse &universe, const TrainingSet &training,
                      const FeatureSet &features, const LearnerSpec &spec,
                      InvalidationMode mode = InvalidationMode::exact,
                      std::uint64_t budget = kDefaultSubsetBudget);

// True iff fitting on S misclassifies some example of S.
bool verify_invalidation(const ObjectUniverse &universe, const TrainingSet &subset,
                         const FeatureSet &features, const LearnerSpec &spec);

} // namespace prederr
