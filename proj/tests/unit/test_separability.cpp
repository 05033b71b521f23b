#include "doctest.h"

#include <vector>

#include "prederr/scenarios.hpp"
#include "prederr/separability.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace prederr;

namespace {

std::vector<Point> pts(std::initializer_list<Point> p) { return p; }

} // namespace

TEST_CASE("separability on small sets") {
  auto v = strictly_separable(pts({{5}}), pts({{7}}));
  CHECK(v.separable);
  REQUIRE(v.witness);
  CHECK(oracle::strictly_separates(*v.witness, pts({{5}}), pts({{7}})));

  auto xp = pts({{0, 0}, {1, 1}}), xn = pts({{0, 1}, {1, 0}});
  CHECK_FALSE(strictly_separable(xp, xn).separable);
  CHECK_FALSE(strictly_separable(xp, xn).witness);

  CHECK_FALSE(strictly_separable(pts({{2, 3}}), pts({{2, 3}})).separable);
  CHECK(strictly_separable(pts({}), pts({{1, 1}})).separable);
  CHECK(strictly_separable(pts({}), pts({})).separable);
  CHECK_THROWS_AS(strictly_separable(pts({{1}}), pts({{1, 2}})), DimensionMismatch);
}

TEST_CASE("witness satisfies the unit margin constraints") {
  auto s = gen_separable(40, 3, 0.05, 9);
  auto rows = featurize_training_set(s.features(), s.training(), s.universe);
  auto v = strictly_separable(rows);
  REQUIRE(v.witness);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto z = oracle::affine(*v.witness, rows.row(i));
    if (rows.label(i) == Label::one)
      CHECK(z >= 1 - 1e-6);
    else
      CHECK(z <= -1 + 1e-6);
  }
}

TEST_CASE("separability is symmetric in the two classes") {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<Point> p, n;
    for (int i = 0; i < 4; ++i)
      p.push_back({rng.uniform(), rng.uniform()});
    for (int i = 0; i < 4; ++i)
      n.push_back({rng.uniform() + 0.3, rng.uniform()});
    CHECK(strictly_separable(p, n).separable == strictly_separable(n, p).separable);
  }
}

TEST_CASE("hull oracle on small sets") {
  CHECK(hulls_intersect(pts({{0, 0}, {1, 1}}), pts({{0, 1}, {1, 0}})));
  CHECK_FALSE(hulls_intersect(pts({{0}}), pts({{1}})));
  CHECK(hulls_intersect(pts({{3, 3}}), pts({{3, 3}})));
  std::vector<Point> many(13, Point{0.0});
  CHECK_THROWS_AS(hulls_intersect(many, pts({})), OracleCapExceeded);
}

TEST_CASE("separability agrees with the hull oracle and 1-D ordering") {
  Rng rng(42);
  for (int t = 0; t < 150; ++t) {
    std::size_t d = 1 + rng.index(3);
    std::size_t np = 1 + rng.index(5), nn = 1 + rng.index(5);
    std::vector<Point> p, n;
    for (std::size_t i = 0; i < np + nn; ++i) {
      Point x(d);
      for (auto &c : x)
        c = std::round(rng.uniform(-2, 2) * 4) / 4;
      (i < np ? p : n).push_back(x);
    }
    auto v = strictly_separable(p, n);
    CHECK(v.separable == !hulls_intersect(p, n));
    if (v.separable)
      CHECK(oracle::strictly_separates(*v.witness, p, n));
    if (d == 1) {
      double pmin = 1e9, pmax = -1e9, nmin = 1e9, nmax = -1e9;
      for (auto &x : p)
        pmin = std::min(pmin, x[0]), pmax = std::max(pmax, x[0]);
      for (auto &x : n)
        nmin = std::min(nmin, x[0]), nmax = std::max(nmax, x[0]);
      CHECK(v.separable == (pmax < nmin || nmax < pmin));
    }
  }
}

TEST_CASE("Kirchberger witness for XOR has four points and every triple is separable") {
  auto s = gen_xor();
  auto rows = featurize_training_set(s.features(), s.training(), s.universe);
  auto w = kirchberger_witness(rows);
  REQUIRE(w);
  CHECK(w->ids.size() == 4);
  CHECK(w->minimum);
  for (std::uint32_t mask = 0; mask < 16; ++mask) {
    if (std::popcount(mask) != 3)
      continue;
    std::vector<Point> p, n;
    oracle::split(rows, mask, p, n);
    CHECK_FALSE(hulls_intersect(p, n));
  }
}

TEST_CASE("Kirchberger witness edge cases") {
  auto s = gen_separable(15, 2, 0.1, 2);
  CHECK_FALSE(kirchberger_witness(featurize_training_set(s.features(), s.training(), s.universe)));

  for (std::size_t d : {1u, 3u}) {
    std::vector<LabeledPoint> lp{{"a", Point(d, 0.5), Label::one},
                                 {"b", Point(d, 0.5), Label::zero},
                                 {"c", Point(d, 2.0), Label::one}};
    auto w = kirchberger_witness(lp, d);
    REQUIRE(w);
    CHECK(w->ids == std::vector<ObjectId>{"a", "b"});
  }
}

TEST_CASE("Kirchberger witness is minimum against exhaustive search") {
  Rng rng(77);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    std::size_t d = 1 + rng.index(2);
    std::size_t n = 4 + rng.index(6);
    FeaturizedTrainingSet rows(d);
    for (std::size_t i = 0; i < n; ++i) {
      Point x(d);
      for (auto &c : x)
        c = rng.uniform();
      rows.add_row(x, rng.uniform() < 0.5 ? Label::zero : Label::one,
                   "o" + std::to_string(10 + i));
    }
    auto w = kirchberger_witness(rows);
    auto best = oracle::min_nonseparable_size(rows);
    CHECK(w.has_value() == best.has_value());
    if (w && best) {
      CHECK(w->ids.size() == *best);
      CHECK(w->ids.size() <= d + 2);
      ++checked;
    }
  }
  CHECK(checked > 10);
}
