#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "prederr/kernels.hpp"

namespace prederr {

class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSubsetBudget = 1'000'000;

// Smallest subset of {0..n-1} (size <= max_size, lexicographic within a size)
// for which `hit` holds. Throws BudgetExceeded before enumerating a size that
// would push the total number of tested subsets past `budget`.
std::optional<std::vector<std::size_t>>
minimum_subset(std::size_t n, std::size_t max_size, std::uint64_t budget,
               const kernels::CombinationPredicate &hit,
               std::size_t min_size = 1);

// Deletion filter: starting from the whole set (which must satisfy `hit`),
// drop each index in order whenever the rest still satisfies `hit`. The result
// is inclusion-minimal, not necessarily minimum.
std::vector<std::size_t> shrink_greedy(std::size_t n,
                                       const kernels::CombinationPredicate &hit);

} // namespace prederr
