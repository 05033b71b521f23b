#include "prederr/kernels.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>

namespace prederr::kernels {

namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelWork = 4096;
constexpr std::uint64_t kRanksPerChunk = 512;

inline void logistic_row(const FeaturizedTrainingSet &rows,
                         std::span<const double> w, double b, std::size_t i,
                         double &loss, double &residual) {
  auto x = rows.row(i);
  double z = b;
  for (std::size_t j = 0; j < x.size(); ++j)
    z += w[j] * x[j];
  double y = rows.label(i) == Label::one ? 1.0 : 0.0;
  loss = softplus(z) - y * z;
  residual = sigmoid(z) - y;
}

inline double squared_distance_row(const FeaturizedTrainingSet &rows,
                                   std::span<const double> q, std::size_t i) {
  auto x = rows.row(i);
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double d = x[j] - q[j];
    s += d * d;
  }
  return s;
}

} // namespace

double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0)
    return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n)
    return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step.
    unsigned __int128 next =
        static_cast<unsigned __int128>(r) * (n - k + i) / i;
    if (next > kMax)
      return kMax;
    r = static_cast<std::uint64_t>(next);
  }
  return r;
}

std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k,
                                            std::uint64_t rank) {
  std::vector<std::size_t> comb;
  comb.reserve(k);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t c = next; c < n; ++c) {
      std::uint64_t with_c = binomial(n - c - 1, k - slot - 1);
      if (rank < with_c) {
        comb.push_back(c);
        next = c + 1;
        break;
      }
      rank -= with_c;
    }
  }
  return comb;
}

bool next_combination(std::vector<std::size_t> &comb, std::size_t n) {
  const std::size_t k = comb.size();
  for (std::size_t i = k; i-- > 0;) {
    if (comb[i] < n - k + i) {
      ++comb[i];
      for (std::size_t j = i + 1; j < k; ++j)
        comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

void logistic_terms(const FeaturizedTrainingSet &rows, std::span<const double> w,
                    double b, std::span<double> loss, std::span<double> residual) {
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
  const bool wide = rows.size() * (rows.dim() + 1) >= kParallelWork;
#pragma omp parallel for schedule(static) if (wide)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto u = static_cast<std::size_t>(i);
    logistic_row(rows, w, b, u, loss[u], residual[u]);
  }
}

void squared_distances(const FeaturizedTrainingSet &rows,
                       std::span<const double> query, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(rows.size());
  const bool wide = rows.size() * (rows.dim() + 1) >= kParallelWork;
#pragma omp parallel for schedule(static) if (wide)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto u = static_cast<std::size_t>(i);
    out[u] = squared_distance_row(rows, query, u);
  }
}

std::optional<std::vector<std::size_t>>
first_combination(std::size_t n, std::size_t k,
                  const CombinationPredicate &accept) {
  const std::uint64_t total = binomial(n, k);
  if (total == 0)
    return std::nullopt;
  if (total <= kRanksPerChunk)
    return serial::first_combination(n, k, accept);

  const std::uint64_t chunks = (total + kRanksPerChunk - 1) / kRanksPerChunk;
  std::atomic<std::uint64_t> best{total};
  std::exception_ptr failure;
  std::mutex failure_mutex;

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t chunk = 0; chunk < static_cast<std::int64_t>(chunks);
       ++chunk) {
    const std::uint64_t start = static_cast<std::uint64_t>(chunk) * kRanksPerChunk;
    if (start >= best.load(std::memory_order_relaxed))
      continue;
    try {
      auto comb = unrank_combination(n, k, start);
      const std::uint64_t stop = std::min(total, start + kRanksPerChunk);
      for (std::uint64_t r = start; r < stop; ++r) {
        if (r >= best.load(std::memory_order_relaxed))
          break;
        if (accept(comb)) {
          std::uint64_t cur = best.load();
          while (r < cur && !best.compare_exchange_weak(cur, r)) {
          }
          break;
        }
        next_combination(comb, n);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure)
        failure = std::current_exception();
      best.store(0);
    }
  }
  if (failure)
    std::rethrow_exception(failure);
  if (best.load() == total)
    return std::nullopt;
  return unrank_combination(n, k, best.load());
}

namespace serial {

void logistic_terms(const FeaturizedTrainingSet &rows, std::span<const double> w,
                    double b, std::span<double> loss, std::span<double> residual) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    logistic_row(rows, w, b, i, loss[i], residual[i]);
}

void squared_distances(const FeaturizedTrainingSet &rows,
                       std::span<const double> query, std::span<double> out) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[i] = squared_distance_row(rows, query, i);
}

std::optional<std::vector<std::size_t>>
first_combination(std::size_t n, std::size_t k,
                  const CombinationPredicate &accept) {
  if (k > n)
    return std::nullopt;
  std::vector<std::size_t> comb(k);
  for (std::size_t i = 0; i < k; ++i)
    comb[i] = i;
  do {
    if (accept(comb))
      return comb;
  } while (next_combination(comb, n));
  return std::nullopt;
}

} // namespace serial

} // namespace prederr::kernels
