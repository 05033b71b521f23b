#include <benchmark/benchmark.h>

#include <vector>

#include "prederr/kernels.hpp"
#include "prederr/scenarios.hpp"

using namespace prederr;

namespace {

FeaturizedTrainingSet random_rows(std::size_t n, std::size_t d) {
  Rng rng(42);
  FeaturizedTrainingSet rows(d);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto &v : x)
      v = rng.uniform(-1, 1);
    rows.add_row(x, rng.uniform() < 0.5 ? Label::zero : Label::one, "r" + std::to_string(i));
  }
  return rows;
}

template <bool Parallel> void logistic(benchmark::State &state) {
  auto rows = random_rows(static_cast<std::size_t>(state.range(0)), 8);
  std::vector<double> w(8, 0.25), loss(rows.size()), residual(rows.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::logistic_terms(rows, w, 0.1, loss, residual);
    else
      kernels::serial::logistic_terms(rows, w, 0.1, loss, residual);
    benchmark::DoNotOptimize(loss.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel> void distances(benchmark::State &state) {
  auto rows = random_rows(static_cast<std::size_t>(state.range(0)), 8);
  std::vector<double> query(8, 0.5), out(rows.size());
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::squared_distances(rows, query, out);
    else
      kernels::serial::squared_distances(rows, query, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Only subsets starting at n - k pass, so nearly every subset is visited.
template <bool Parallel> void combinations(benchmark::State &state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0)), k = 4;
  kernels::CombinationPredicate accept = [&](std::span<const std::size_t> c) {
    return c[0] == n - k;
  };
  for (auto _ : state) {
    auto found = Parallel ? kernels::first_combination(n, k, accept)
                          : kernels::serial::first_combination(n, k, accept);
    benchmark::DoNotOptimize(found);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kernels::binomial(n, k)));
}

} // namespace

BENCHMARK(logistic<false>)->Name("logistic_terms/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(logistic<true>)->Name("logistic_terms/parallel")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(distances<false>)->Name("squared_distances/serial")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(distances<true>)->Name("squared_distances/parallel")->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(combinations<false>)->Name("first_combination/serial")->Arg(24)->Arg(40);
BENCHMARK(combinations<true>)->Name("first_combination/parallel")->Arg(24)->Arg(40);

BENCHMARK_MAIN();
