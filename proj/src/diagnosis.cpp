#include "prederr/diagnosis.hpp"

#include <cmath>

#include "prederr/separability.hpp"

namespace prederr {

std::string to_string(ErrorCategory c) {
  switch (c) {
  case ErrorCategory::mislabeling:
    return "mislabeling";
  case ErrorCategory::representation:
    return "representation";
  case ErrorCategory::learner:
    return "learner";
  case ErrorCategory::boundary:
    return "boundary";
  }
  return "?";
}

std::string to_string(LearnerSubtype s) {
  return s == LearnerSubtype::optimization ? "optimization" : "objective";
}

namespace {

std::vector<Example> examples_of(const FeaturizedTrainingSet &rows,
                                 const std::vector<ObjectId> &ids) {
  std::vector<Example> out;
  for (const auto &id : ids)
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows.id(i) == id) {
        out.emplace_back(id, rows.label(i));
        break;
      }
  return out;
}

RealizabilityCheck linear_check() {
  return {
      [](const FeaturizedTrainingSet &rows) {
        return strictly_separable(rows).separable;
      },
      [](const FeaturizedTrainingSet &rows) {
        RepresentationEvidence ev;
        ev.kind = RepresentationEvidence::Kind::kirchberger;
        if (auto w = kirchberger_witness(rows)) {
          ev.subset = examples_of(rows, w->ids);
          ev.minimum = w->minimum;
        }
        return ev;
      }};
}

RealizabilityCheck collision_check() {
  return {
      [](const FeaturizedTrainingSet &rows) {
        return !conflicting_collision(rows).has_value();
      },
      [](const FeaturizedTrainingSet &rows) {
        RepresentationEvidence ev;
        ev.kind = RepresentationEvidence::Kind::collision;
        if (auto pair = conflicting_collision(rows)) {
          ev.subset = {{rows.id(pair->first), rows.label(pair->first)},
                       {rows.id(pair->second), rows.label(pair->second)}};
        }
        return ev;
      }};
}

struct Verdict {
  ErrorCategory category;
  std::optional<LearnerSubtype> subtype;
  Evidence evidence;
};

// Mislabels are looked for only among `scope`, the rest runs on `rows`.
Verdict classify_rows(const DiagnosisContext &ctx, const TrainingSet &scope,
                      const FeaturizedTrainingSet &rows, const LearnerSpec &spec,
                      const RealizabilityCheck &check) {
  MislabelingEvidence mis;
  for (const auto &[id, y] : scope)
    if (y != ctx.oracle(id))
      mis.mislabeled.emplace_back(id, y);
  if (!mis.mislabeled.empty())
    return {ErrorCategory::mislabeling, std::nullopt, std::move(mis)};

  if (check.realizable(rows)) {
    auto split = split_learner_error(rows, spec);
    return {ErrorCategory::learner, split.subtype, std::move(split.evidence)};
  }
  return {ErrorCategory::representation, std::nullopt, check.witness(rows)};
}

double loss_of(const LinearHypothesis &h, const FeaturizedTrainingSet &rows,
               double lambda) {
  return penalized_loss(h, rows, lambda);
}

LinearHypothesis scaled(const LinearHypothesis &h, double beta) {
  LinearHypothesis out = h;
  for (auto &w : out.w)
    w *= beta;
  out.b *= beta;
  return out;
}

} // namespace

const RealizabilityRegistry &RealizabilityRegistry::standard() {
  static const RealizabilityRegistry registry = [] {
    RealizabilityRegistry r;
    r.add(LearnerKind::logreg_ml, linear_check());
    r.add(LearnerKind::logreg_reg, linear_check());
    r.add(LearnerKind::one_nn, collision_check());
    r.add(LearnerKind::knn, collision_check());
    return r;
  }();
  return registry;
}

void RealizabilityRegistry::add(LearnerKind kind, RealizabilityCheck check) {
  checks_[kind] = std::move(check);
}

void RealizabilityRegistry::remove(LearnerKind kind) { checks_.erase(kind); }

const RealizabilityCheck &RealizabilityRegistry::at(LearnerKind kind) const {
  auto it = checks_.find(kind);
  if (it == checks_.end())
    throw UnregisteredLearner("no realizability check registered for learner '" +
                              to_string(kind) + "'");
  return it->second;
}

bool is_realizable(const FeaturizedTrainingSet &rows, LearnerKind kind,
                   const RealizabilityRegistry &registry) {
  return registry.at(kind).realizable(rows);
}

LinearHypothesis best_consistent_linear(const FeaturizedTrainingSet &rows,
                                        double lambda) {
  auto verdict = strictly_separable(rows);
  if (!verdict.separable || !verdict.witness)
    throw InternalInconsistency("no consistent linear hypothesis for realizable rows");
  const LinearHypothesis base = *verdict.witness;
  if (rows.empty())
    return base;

  // Golden-section search for the best scale along the witness ray, in log10.
  auto phi = [&](double t) { return loss_of(scaled(base, std::pow(10.0, t)), rows, lambda); };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -4.0, hi = 6.0;
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = phi(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = phi(d);
    }
  }
  LinearHypothesis h = scaled(base, std::pow(10.0, (lo + hi) / 2.0));
  if (!training_errors(h, rows).empty())
    h = base;

  // Descent restricted to the (open) consistent region.
  double f = loss_of(h, rows, lambda);
  double step = 1.0;
  for (int it = 0; it < 2000; ++it) {
    auto g = penalized_loss_gradient(h, rows, lambda);
    double gg = g.b * g.b;
    for (double v : g.w)
      gg += v * v;
    if (std::sqrt(gg) <= 1e-10)
      break;
    bool accepted = false;
    for (double t = step; t > 1e-20; t *= 0.5) {
      LinearHypothesis cand = h;
      for (std::size_t j = 0; j < cand.w.size(); ++j)
        cand.w[j] -= t * g.w[j];
      cand.b -= t * g.b;
      double fcand = loss_of(cand, rows, lambda);
      if (std::isfinite(fcand) && fcand <= f - 1e-4 * t * gg &&
          training_errors(cand, rows).empty()) {
        h = std::move(cand);
        f = fcand;
        step = std::min(2.0 * t, 1e12);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      break;
  }
  return h;
}

LearnerSplit split_learner_error(const FeaturizedTrainingSet &rows,
                                 const LearnerSpec &spec) {
  LearnerSplit out;
  if (!spec.is_linear())
    return out;
  auto fitted = std::get<LinearHypothesis>(fit(spec, rows));
  auto consistent = best_consistent_linear(rows, spec.lambda);
  double lr = loss_of(fitted, rows, spec.lambda);
  double lc = loss_of(consistent, rows, spec.lambda);
  out.subtype = lc < lr - kLossGapTolerance ? LearnerSubtype::optimization
                                            : LearnerSubtype::objective;
  out.evidence = {lr, lc, consistent};
  return out;
}

std::optional<ObjectId> first_training_error(const DiagnosisContext &ctx,
                                             const TrainingSet &training,
                                             const FeatureSet &features,
                                             const LearnerSpec &spec) {
  auto rows = featurize_training_set(features, training, ctx.universe);
  auto h = fit(spec, rows);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (predict(h, rows.row(i)) != ctx.oracle(rows.id(i)))
      return rows.id(i);
  return std::nullopt;
}

std::optional<Diagnosis>
classify_training_error(const DiagnosisContext &ctx, const TrainingSet &training,
                        const FeatureSet &features, const LearnerSpec &spec,
                        const std::optional<ObjectId> &object) {
  spec.validate();
  const auto &check = ctx.registry.at(spec.kind);
  auto rows = featurize_training_set(features, training, ctx.universe);
  auto h = fit(spec, rows);

  std::optional<ObjectId> target;
  for (std::size_t i = 0; i < rows.size() && !target; ++i) {
    if (object && rows.id(i) != *object)
      continue;
    if (predict(h, rows.row(i)) != ctx.oracle(rows.id(i)))
      target = rows.id(i);
  }
  if (!target)
    return std::nullopt;

  auto v = classify_rows(ctx, training, rows, spec, check);
  return Diagnosis{*target, v.category, v.subtype, std::move(v.evidence), std::move(h),
                   std::nullopt};
}

std::optional<Diagnosis> classify_prediction_error(const DiagnosisContext &ctx,
                                                   const ObjectId &x,
                                                   const TrainingSet &training,
                                                   const FeatureSet &features,
                                                   const LearnerSpec &spec) {
  spec.validate();
  const auto &check = ctx.registry.at(spec.kind);
  if (training.contains(x))
    return classify_training_error(ctx, training, features, spec, x);

  const Object &obj = ctx.universe.at(x);
  auto rows = featurize_training_set(features, training, ctx.universe);
  auto before = fit(spec, rows);
  const Label truth = ctx.oracle(x);
  if (predict(before, featurize(features, obj)) == truth)
    return std::nullopt;

  TrainingSet augmented = training;
  augmented.insert(x, truth);
  auto rows_after = featurize_training_set(features, augmented, ctx.universe);
  auto after = fit(spec, rows_after);
  if (training_errors(after, rows_after).empty())
    return Diagnosis{x,      ErrorCategory::boundary,
                     std::nullopt, BoundaryEvidence{{x, truth}},
                     std::move(before), std::move(after)};

  auto v = classify_rows(ctx, training, rows_after, spec, check);
  return Diagnosis{x, v.category, v.subtype, std::move(v.evidence), std::move(before),
                   std::move(after)};
}

} // namespace prederr
