#include "prederr/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prederr/kernels.hpp"
#include "prederr/separability.hpp"

namespace prederr {

std::string to_string(LearnerKind kind) {
  switch (kind) {
  case LearnerKind::logreg_ml:
    return "logreg-ml";
  case LearnerKind::logreg_reg:
    return "logreg-reg";
  case LearnerKind::one_nn:
    return "1nn";
  case LearnerKind::knn:
    return "knn";
  }
  return "?";
}

LearnerKind learner_kind_from_string(const std::string &name) {
  for (auto k : {LearnerKind::logreg_ml, LearnerKind::logreg_reg,
                 LearnerKind::one_nn, LearnerKind::knn})
    if (to_string(k) == name)
      return k;
  throw InvalidLearnerSpec("unknown learner '" + name +
                           "' (expected logreg-ml, logreg-reg, 1nn or knn)");
}

LearnerSpec LearnerSpec::logreg_ml() { return {}; }

LearnerSpec LearnerSpec::logreg_reg(double lambda) {
  LearnerSpec s;
  s.kind = LearnerKind::logreg_reg;
  s.lambda = lambda;
  return s;
}

LearnerSpec LearnerSpec::one_nn() {
  LearnerSpec s;
  s.kind = LearnerKind::one_nn;
  return s;
}

LearnerSpec LearnerSpec::knn(int k) {
  LearnerSpec s;
  s.kind = LearnerKind::knn;
  s.k = k;
  return s;
}

void LearnerSpec::validate() const {
  switch (kind) {
  case LearnerKind::logreg_ml:
    if (lambda != 0.0)
      throw InvalidLearnerSpec("logreg-ml requires lambda = 0");
    break;
  case LearnerKind::logreg_reg:
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw InvalidLearnerSpec("logreg-reg requires a finite lambda > 0");
    break;
  case LearnerKind::one_nn:
    if (k != 1)
      throw InvalidLearnerSpec("1nn requires k = 1");
    break;
  case LearnerKind::knn:
    if (k <= 1 || k % 2 == 0)
      throw InvalidLearnerSpec("knn requires an odd k > 1");
    break;
  }
  if (budget.max_iterations < 0 || !(budget.gradient_tolerance >= 0.0) ||
      !(budget.initial_step > 0.0) || !(budget.shrink > 0.0 && budget.shrink < 1.0))
    throw InvalidLearnerSpec("invalid optimizer budget");
}

MemorizedHypothesis::MemorizedHypothesis(FeaturizedTrainingSet r, int kk)
    : rows(std::move(r)), k(kk) {
  const std::size_t n = rows.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows.id(a) < rows.id(b);
  });
  for (std::size_t oi = 0; oi < n; ++oi) {
    auto i = order[oi];
    auto xi = rows.row(i);
    bool shadowed = std::any_of(representatives.begin(), representatives.end(),
                                [&](std::size_t j) {
                                  auto xj = rows.row(j);
                                  return std::equal(xi.begin(), xi.end(), xj.begin());
                                });
    if (!shadowed)
      representatives.push_back(i);
  }
}

std::size_t hypothesis_dim(const Hypothesis &h) {
  return std::visit(
      [](const auto &x) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, LinearHypothesis>)
          return x.w.size();
        else
          return x.rows.dim();
      },
      h);
}

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v)
    s += x * x;
  return std::sqrt(s);
}

struct LogisticObjective {
  const FeaturizedTrainingSet &rows;
  double lambda;
  mutable std::vector<double> loss, residual;

  LogisticObjective(const FeaturizedTrainingSet &r, double l)
      : rows(r), lambda(l), loss(r.size()), residual(r.size()) {}

  double value(const LinearHypothesis &h) const {
    kernels::logistic_terms(rows, h.w, h.b, loss, residual);
    double f = 0.0;
    for (double v : loss)
      f += v;
    return f + lambda * norm2(h.w);
  }

  double value_and_gradient(const LinearHypothesis &h, LossGradient &g) const {
    double f = value(h);
    const std::size_t d = rows.dim();
    g.w.assign(d, 0.0);
    g.b = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto x = rows.row(i);
      for (std::size_t j = 0; j < d; ++j)
        g.w[j] += residual[i] * x[j];
      g.b += residual[i];
    }
    double wn = norm2(h.w);
    if (lambda > 0.0 && wn > 0.0)
      for (std::size_t j = 0; j < d; ++j)
        g.w[j] += lambda * h.w[j] / wn;
    return f;
  }
};

bool all_finite(const LossGradient &g, double f) {
  if (!std::isfinite(f) || !std::isfinite(g.b))
    return false;
  return std::all_of(g.w.begin(), g.w.end(), [](double v) { return std::isfinite(v); });
}

LinearHypothesis fit_logistic(const LearnerSpec &spec,
                              const FeaturizedTrainingSet &rows) {
  LinearHypothesis h{std::vector<double>(rows.dim(), 0.0), 0.0};
  if (rows.empty())
    return h;

  const auto &budget = spec.budget;
  LogisticObjective objective(rows, spec.lambda);
  LossGradient g;
  double step = budget.initial_step;
  LinearHypothesis candidate = h;

  for (int it = 0; it < budget.max_iterations; ++it) {
    double f = objective.value_and_gradient(h, g);
    if (!all_finite(g, f))
      throw OptimizerDivergence("logistic regression: non-finite objective or gradient");
    double gg = g.b * g.b;
    for (double v : g.w)
      gg += v * v;
    if (std::sqrt(gg) <= budget.gradient_tolerance)
      break;

    double t = step;
    bool accepted = false;
    while (t > 1e-30) {
      for (std::size_t j = 0; j < h.w.size(); ++j)
        candidate.w[j] = h.w[j] - t * g.w[j];
      candidate.b = h.b - t * g.b;
      double fc = objective.value(candidate);
      if (std::isfinite(fc) && fc <= f - budget.sufficient_decrease * t * gg) {
        accepted = true;
        break;
      }
      t *= budget.shrink;
    }
    if (!accepted)
      break;
    std::swap(h, candidate);
    step = std::min(t * 2.0, 1e12);
  }
  for (double v : h.w)
    if (!std::isfinite(v))
      throw OptimizerDivergence("logistic regression: non-finite weights");
  if (!std::isfinite(h.b))
    throw OptimizerDivergence("logistic regression: non-finite intercept");
  return h;
}

} // namespace

Hypothesis fit(const LearnerSpec &spec, const FeaturizedTrainingSet &rows) {
  spec.validate();
  switch (spec.kind) {
  case LearnerKind::logreg_ml:
  case LearnerKind::logreg_reg: {
    Hypothesis h = fit_logistic(spec, rows);
    if (spec.kind == LearnerKind::logreg_ml && spec.consistency_fallback &&
        !training_errors(h, rows).empty()) {
      auto verdict = strictly_separable(rows);
      if (verdict.separable && verdict.witness) {
        LinearHypothesis scaled = *verdict.witness;
        for (auto &w : scaled.w)
          w *= kFallbackMarginScale;
        scaled.b *= kFallbackMarginScale;
        return scaled;
      }
    }
    return h;
  }
  case LearnerKind::one_nn:
  case LearnerKind::knn:
    return MemorizedHypothesis(rows, spec.k);
  }
  return LinearHypothesis{};
}

Label predict(const LinearHypothesis &h, std::span<const double> v) {
  if (v.size() != h.w.size())
    throw DimensionMismatch("hypothesis has dimension " + std::to_string(h.w.size()) +
                            ", vector has " + std::to_string(v.size()));
  double z = h.b;
  for (std::size_t j = 0; j < v.size(); ++j)
    z += h.w[j] * v[j];
  return z > 0.0 ? Label::one : Label::zero;
}

Label predict(const MemorizedHypothesis &h, std::span<const double> v) {
  if (v.size() != h.rows.dim())
    throw DimensionMismatch("hypothesis has dimension " +
                            std::to_string(h.rows.dim()) + ", vector has " +
                            std::to_string(v.size()));
  if (h.representatives.empty())
    return Label::zero;
  std::vector<double> dist(h.rows.size());
  kernels::squared_distances(h.rows, v, dist);
  auto reps = h.representatives;
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(h.k), reps.size());
  std::partial_sort(reps.begin(), reps.begin() + static_cast<std::ptrdiff_t>(take),
                    reps.end(), [&](std::size_t a, std::size_t b) {
                      if (dist[a] != dist[b])
                        return dist[a] < dist[b];
                      return h.rows.id(a) < h.rows.id(b);
                    });
  std::size_t ones = 0;
  for (std::size_t i = 0; i < take; ++i)
    ones += h.rows.label(reps[i]) == Label::one;
  if (2 * ones == take)
    return h.rows.label(reps[0]);
  return 2 * ones > take ? Label::one : Label::zero;
}

Label predict(const Hypothesis &h, std::span<const double> v) {
  return std::visit([&](const auto &x) { return predict(x, v); }, h);
}

std::vector<std::size_t> training_errors(const Hypothesis &h,
                                         const FeaturizedTrainingSet &rows) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (predict(h, rows.row(i)) != rows.label(i))
      out.push_back(i);
  return out;
}

double penalized_loss(const LinearHypothesis &h, const FeaturizedTrainingSet &rows,
                      double lambda) {
  if (h.w.size() != rows.dim())
    throw DimensionMismatch("hypothesis and rows differ in dimension");
  return LogisticObjective(rows, lambda).value(h);
}

LossGradient penalized_loss_gradient(const LinearHypothesis &h,
                                     const FeaturizedTrainingSet &rows,
                                     double lambda) {
  if (h.w.size() != rows.dim())
    throw DimensionMismatch("hypothesis and rows differ in dimension");
  LossGradient g;
  LogisticObjective(rows, lambda).value_and_gradient(h, g);
  return g;
}

std::optional<std::pair<std::size_t, std::size_t>>
conflicting_collision(const FeaturizedTrainingSet &rows) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows.id(a) < rows.id(b);
  });
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t c = a + 1; c < order.size(); ++c) {
      auto i = order[a], j = order[c];
      if (rows.label(i) == rows.label(j))
        continue;
      auto xi = rows.row(i), xj = rows.row(j);
      if (std::equal(xi.begin(), xi.end(), xj.begin()))
        return std::pair{i, j};
    }
  return std::nullopt;
}

double signed_distance(const LinearHypothesis &h, std::span<const double> v) {
  if (v.size() != h.w.size())
    throw DimensionMismatch("hypothesis and vector differ in dimension");
  double n = norm2(h.w);
  if (n == 0.0)
    throw UndefinedDirection("signed distance needs a nonzero weight vector");
  double z = h.b;
  for (std::size_t j = 0; j < v.size(); ++j)
    z += h.w[j] * v[j];
  return z / n;
}

} // namespace prederr
