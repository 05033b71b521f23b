#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "prederr/domain.hpp"
#include "prederr/invalidation.hpp"
#include "prederr/learners.hpp"
#include "prederr/separability.hpp"

// Reference computations written independently of the library code paths
// they check: plain loops, long double accumulation, exhaustive enumeration.
namespace oracle {

using prederr::FeaturizedTrainingSet;
using prederr::Label;
using prederr::LinearHypothesis;
using prederr::Point;

inline long double affine(const LinearHypothesis &h, std::span<const double> v) {
  long double z = h.b;
  for (std::size_t j = 0; j < v.size(); ++j)
    z += static_cast<long double>(h.w[j]) * v[j];
  return z;
}

inline long double softplus(long double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double loss(const LinearHypothesis &h, const FeaturizedTrainingSet &rows,
                   double lambda) {
  long double total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    long double z = affine(h, rows.row(i));
    total += softplus(z) - (rows.label(i) == Label::one ? z : 0.0L);
  }
  long double n2 = 0;
  for (double w : h.w)
    n2 += static_cast<long double>(w) * w;
  return static_cast<double>(total + lambda * std::sqrt(n2));
}

inline Label threshold(const LinearHypothesis &h, std::span<const double> v) {
  return affine(h, v) > 0 ? Label::one : Label::zero;
}

inline std::size_t linear_errors(const LinearHypothesis &h,
                                 const FeaturizedTrainingSet &rows) {
  std::size_t e = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    e += threshold(h, rows.row(i)) != rows.label(i);
  return e;
}

inline bool strictly_separates(const LinearHypothesis &h, std::span<const Point> pos,
                               std::span<const Point> neg) {
  for (const auto &p : pos)
    if (!(affine(h, p) > 0))
      return false;
  for (const auto &q : neg)
    if (!(affine(h, q) < 0))
      return false;
  return true;
}

// 1NN by linear scan: nearest row, lowest id among equidistant rows.
inline Label nearest_label(const FeaturizedTrainingSet &rows, std::span<const double> v) {
  std::optional<std::size_t> best;
  long double best_d = std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    long double d = 0;
    auto x = rows.row(i);
    for (std::size_t j = 0; j < v.size(); ++j)
      d += (static_cast<long double>(x[j]) - v[j]) * (x[j] - v[j]);
    if (d < best_d || (d == best_d && rows.id(i) < rows.id(*best))) {
      best = i;
      best_d = d;
    }
  }
  return best ? rows.label(*best) : Label::zero;
}

inline bool has_conflicting_twins(const FeaturizedTrainingSet &rows) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      auto a = rows.row(i), b = rows.row(j);
      bool same = true;
      for (std::size_t k = 0; k < a.size(); ++k)
        same = same && a[k] == b[k];
      if (same && rows.label(i) != rows.label(j))
        return true;
    }
  return false;
}

inline void split(const FeaturizedTrainingSet &rows, std::uint32_t mask,
                  std::vector<Point> &pos, std::vector<Point> &neg) {
  pos.clear();
  neg.clear();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (mask >> i & 1u) {
      auto r = rows.row(i);
      (rows.label(i) == Label::one ? pos : neg).emplace_back(r.begin(), r.end());
    }
}

// Smallest subset whose hulls intersect, by brute force over all bitmasks.
inline std::optional<std::size_t> min_nonseparable_size(const FeaturizedTrainingSet &rows) {
  std::optional<std::size_t> best;
  std::vector<Point> pos, neg;
  const std::uint32_t n = static_cast<std::uint32_t>(rows.size());
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    auto c = static_cast<std::size_t>(std::popcount(mask));
    if (best && c >= *best)
      continue;
    split(rows, mask, pos, neg);
    if (!pos.empty() && !neg.empty() && prederr::hulls_intersect(pos, neg))
      best = c;
  }
  return best;
}

inline prederr::TrainingSet masked(const prederr::TrainingSet &t, std::uint32_t mask) {
  std::vector<prederr::Example> keep;
  std::size_t i = 0;
  for (const auto &[id, y] : t) {
    if (mask >> i & 1u)
      keep.emplace_back(id, y);
    ++i;
  }
  return prederr::TrainingSet(keep);
}

// Smallest subset S of T with verify_invalidation(S), over all 2^|T| subsets.
inline std::optional<std::size_t>
min_invalidation_size(const prederr::ObjectUniverse &u, const prederr::TrainingSet &t,
                      const prederr::FeatureSet &f, const prederr::LearnerSpec &spec) {
  std::optional<std::size_t> best;
  const auto n = static_cast<std::uint32_t>(t.size());
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    auto c = static_cast<std::size_t>(std::popcount(mask));
    if (best && c >= *best)
      continue;
    if (prederr::verify_invalidation(u, masked(t, mask), f, spec))
      best = c;
  }
  return best;
}

} // namespace oracle
