#include "prederr/invalidation.hpp"

#include <functional>

#include "prederr/separability.hpp"

namespace prederr {

std::string to_string(InvalidationMode m) {
  return m == InvalidationMode::exact ? "exact" : "greedy";
}

InvalidationMode invalidation_mode_from_string(const std::string &name) {
  if (name == "exact")
    return InvalidationMode::exact;
  if (name == "greedy")
    return InvalidationMode::greedy;
  throw std::invalid_argument("unknown invalidation mode '" + name +
                              "' (expected exact or greedy)");
}

std::size_t invalidation_bound(const LearnerSpec &spec, std::size_t feature_count,
                               std::size_t training_size) {
  if (spec.kind == LearnerKind::logreg_ml && spec.consistency_fallback)
    return feature_count + 2;
  if (spec.kind == LearnerKind::one_nn)
    return 2;
  return training_size;
}

namespace {

bool fit_errs(const FeaturizedTrainingSet &rows, const LearnerSpec &spec) {
  return !training_errors(fit(spec, rows), rows).empty();
}

// Strictly correct on every row under h implies the rows are separable.
bool separated_by(const LinearHypothesis &h, const FeaturizedTrainingSet &rows,
                  std::span<const std::size_t> subset) {
  for (auto i : subset) {
    auto x = rows.row(i);
    double z = h.b;
    for (std::size_t j = 0; j < x.size(); ++j)
      z += h.w[j] * x[j];
    if (rows.label(i) == Label::one ? !(z > 0.0) : !(z < 0.0))
      return false;
  }
  return true;
}

} // namespace

bool verify_invalidation(const ObjectUniverse &universe, const TrainingSet &subset,
                         const FeatureSet &features, const LearnerSpec &spec) {
  return fit_errs(featurize_training_set(features, subset, universe), spec);
}

std::optional<InvalidationSet>
find_invalidation_set(const ObjectUniverse &universe, const TrainingSet &training,
                      const FeatureSet &features, const LearnerSpec &spec,
                      InvalidationMode mode, std::uint64_t budget) {
  spec.validate();
  auto rows = featurize_training_set(features, training, universe);
  auto fitted = fit(spec, rows);
  if (training_errors(fitted, rows).empty())
    return std::nullopt;

  kernels::CombinationPredicate hit;
  if (spec.kind == LearnerKind::logreg_ml && spec.consistency_fallback) {
    // Any subset the current hyperplane already separates can be skipped.
    auto screen = std::get<LinearHypothesis>(fitted);
    hit = [&rows, screen](std::span<const std::size_t> s) {
      bool pos = false, neg = false;
      for (auto i : s)
        (rows.label(i) == Label::one ? pos : neg) = true;
      if (!pos || !neg || separated_by(screen, rows, s))
        return false;
      return !rows_separable(rows, s);
    };
  } else if (spec.kind == LearnerKind::one_nn) {
    hit = [&rows](std::span<const std::size_t> s) {
      return conflicting_collision(rows.select(s)).has_value();
    };
  } else {
    hit = [&rows, &spec](std::span<const std::size_t> s) {
      return fit_errs(rows.select(s), spec);
    };
  }

  const std::size_t bound = invalidation_bound(spec, features.dim(), rows.size());
  std::optional<std::vector<std::size_t>> found;
  bool minimum = mode == InvalidationMode::exact;
  if (minimum)
    found = minimum_subset(rows.size(), bound, budget, hit);
  else
    found = shrink_greedy(rows.size(), hit);
  if (!found)
    return std::nullopt;

  InvalidationSet out;
  out.minimum = minimum;
  out.bound = bound;
  for (auto i : *found)
    out.subset.insert(rows.id(i), rows.label(i));
  return out;
}

} // namespace prederr
