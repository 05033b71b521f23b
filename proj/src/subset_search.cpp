#include "prederr/subset_search.hpp"

#include <algorithm>
#include <string>

namespace prederr {

std::optional<std::vector<std::size_t>>
minimum_subset(std::size_t n, std::size_t max_size, std::uint64_t budget,
               const kernels::CombinationPredicate &hit, std::size_t min_size) {
  max_size = std::min(max_size, n);
  std::uint64_t spent = 0;
  for (std::size_t k = min_size; k <= max_size; ++k) {
    std::uint64_t count = kernels::binomial(n, k);
    if (count > budget - spent)
      throw BudgetExceeded("exact subset search needs more than " +
                           std::to_string(budget) + " subsets at size " +
                           std::to_string(k) + "; use greedy mode");
    spent += count;
    if (auto found = kernels::first_combination(n, k, hit))
      return found;
  }
  return std::nullopt;
}

std::vector<std::size_t> shrink_greedy(std::size_t n,
                                       const kernels::CombinationPredicate &hit) {
  std::vector<std::size_t> keep(n);
  for (std::size_t i = 0; i < n; ++i)
    keep[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> trial;
    trial.reserve(keep.size());
    for (auto j : keep)
      if (j != i)
        trial.push_back(j);
    if (trial.size() < keep.size() && hit(trial))
      keep = std::move(trial);
  }
  return keep;
}

} // namespace prederr
