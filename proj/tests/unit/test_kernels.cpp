#include "doctest.h"

#include <atomic>
#include <cmath>
#include <vector>

#include "prederr/kernels.hpp"
#include "prederr/scenarios.hpp"
#include "prederr/subset_search.hpp"
#include "oracles.hpp"

using namespace prederr;

namespace {

FeaturizedTrainingSet random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  FeaturizedTrainingSet rows(d);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto &v : x)
      v = rng.uniform(-3, 3);
    rows.add_row(x, rng.uniform() < 0.5 ? Label::zero : Label::one, std::to_string(i));
  }
  return rows;
}

} // namespace

TEST_CASE("parallel logistic terms match the serial reference bit for bit") {
  auto rows = random_rows(5000, 4, 1);
  std::vector<double> w{0.5, -1.25, 2.0, 0.1};
  std::vector<double> l1(rows.size()), r1(rows.size()), l2(rows.size()), r2(rows.size());
  kernels::logistic_terms(rows, w, 0.3, l1, r1);
  kernels::serial::logistic_terms(rows, w, 0.3, l2, r2);
  CHECK(l1 == l2);
  CHECK(r1 == r2);

  LinearHypothesis h{w, 0.3};
  double sum = 0;
  for (double v : l1)
    sum += v;
  CHECK(sum == doctest::Approx(oracle::loss(h, rows, 0.0)).epsilon(1e-12));
}

TEST_CASE("parallel squared distances match the serial reference") {
  auto rows = random_rows(4000, 3, 2);
  std::vector<double> q{0.1, 0.2, -0.3};
  std::vector<double> a(rows.size()), b(rows.size());
  kernels::squared_distances(rows, q, a);
  kernels::serial::squared_distances(rows, q, b);
  CHECK(a == b);
  auto r = rows.row(17);
  double d = 0;
  for (std::size_t j = 0; j < 3; ++j)
    d += (r[j] - q[j]) * (r[j] - q[j]);
  CHECK(a[17] == doctest::Approx(d));
}

TEST_CASE("softplus and sigmoid are stable at the extremes") {
  CHECK(kernels::softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(kernels::softplus(800.0) == doctest::Approx(800.0));
  CHECK(kernels::softplus(-800.0) >= 0.0);
  CHECK(kernels::sigmoid(800.0) == 1.0);
  CHECK(kernels::sigmoid(-800.0) == doctest::Approx(0.0));
}

TEST_CASE("combinations are ranked lexicographically") {
  CHECK(kernels::binomial(5, 2) == 10);
  CHECK(kernels::binomial(3, 5) == 0);
  CHECK(kernels::binomial(200, 100) == UINT64_MAX);

  std::vector<std::size_t> c{0, 1, 2};
  std::uint64_t rank = 0;
  do {
    CHECK(kernels::unrank_combination(6, 3, rank) == c);
    ++rank;
  } while (kernels::next_combination(c, 6));
  CHECK(rank == kernels::binomial(6, 3));
}

TEST_CASE("first accepted combination agrees between parallel and serial search") {
  for (std::size_t target = 0; target < 40; target += 7) {
    auto accept = [&](std::span<const std::size_t> s) {
      std::size_t sum = 0;
      for (auto i : s)
        sum += i;
      return sum >= target && s[0] % 2 == 1;
    };
    auto a = kernels::first_combination(12, 3, accept);
    auto b = kernels::serial::first_combination(12, 3, accept);
    CHECK(a == b);
  }
  CHECK_FALSE(kernels::first_combination(5, 2, [](auto) { return false; }));
}

TEST_CASE("minimum subset search respects size order and budget") {
  auto hit = [](std::span<const std::size_t> s) {
    return s.size() >= 2 && s[0] == 1 && s.back() == 4;
  };
  auto s = minimum_subset(6, 6, 1000, hit);
  REQUIRE(s);
  CHECK(*s == std::vector<std::size_t>{1, 4});
  CHECK_FALSE(minimum_subset(6, 1, 1000, hit));
  CHECK_THROWS_AS(minimum_subset(40, 5, 100, [](auto) { return false; }), BudgetExceeded);

  auto g = shrink_greedy(6, [](std::span<const std::size_t> s) {
    int n = 0;
    for (auto i : s)
      n += (i == 2 || i == 5);
    return n == 2;
  });
  CHECK(g == std::vector<std::size_t>{2, 5});
}
