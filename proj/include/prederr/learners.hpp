#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prederr/domain.hpp"
#include "prederr/hypothesis.hpp"

namespace prederr {

enum class LearnerKind { logreg_ml, logreg_reg, one_nn, knn };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string &name);

struct OptimizerBudget {
  int max_iterations = 10'000;
  double gradient_tolerance = 1e-8;
  // Backtracking (Armijo) line search.
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
};

struct LearnerSpec {
  LearnerKind kind = LearnerKind::logreg_ml;
  double lambda = 0.0;
  int k = 1;
  OptimizerBudget budget;
  // LogRegML only: replace an inconsistent optimizer result by the scaled
  // separating hyperplane when the rows are separable.
  bool consistency_fallback = true;

  static LearnerSpec logreg_ml();
  static LearnerSpec logreg_reg(double lambda);
  static LearnerSpec one_nn();
  static LearnerSpec knn(int k);

  void validate() const;
  bool is_linear() const {
    return kind == LearnerKind::logreg_ml || kind == LearnerKind::logreg_reg;
  }
  bool is_consistent() const {
    return kind == LearnerKind::logreg_ml || kind == LearnerKind::one_nn;
  }
};

inline constexpr double kFallbackMarginScale = 1e4;

class InvalidLearnerSpec : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class OptimizerDivergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UndefinedDirection : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Memorized rows for nearest-neighbour prediction. Rows sharing an identical
// feature vector collapse onto the lowest object id among them.
struct MemorizedHypothesis {
  FeaturizedTrainingSet rows;
  int k = 1;
  std::vector<std::size_t> representatives;

  MemorizedHypothesis() = default;
  MemorizedHypothesis(FeaturizedTrainingSet rows, int k);

  friend bool operator==(const MemorizedHypothesis &a,
                         const MemorizedHypothesis &b) {
    return a.k == b.k && a.rows == b.rows;
  }
};

using Hypothesis = std::variant<LinearHypothesis, MemorizedHypothesis>;

std::size_t hypothesis_dim(const Hypothesis &h);

Hypothesis fit(const LearnerSpec &spec, const FeaturizedTrainingSet &rows);

// Linear: 1 iff w.v + b > 0 (ties go to 0). Memorized: majority of the k
// nearest representatives, nearest first on ties; an empty memory predicts 0.
Label predict(const Hypothesis &h, std::span<const double> v);
Label predict(const LinearHypothesis &h, std::span<const double> v);
Label predict(const MemorizedHypothesis &h, std::span<const double> v);

// Rows of `rows` whose prediction disagrees with the stored label.
std::vector<std::size_t> training_errors(const Hypothesis &h,
                                         const FeaturizedTrainingSet &rows);

// sum_i log(1 + e^{z_i}) - y_i z_i + lambda ||w||_2, z_i = w.v_i + b.
double penalized_loss(const LinearHypothesis &h, const FeaturizedTrainingSet &rows,
                      double lambda);

struct LossGradient {
  std::vector<double> w;
  double b = 0.0;
};

// Gradient of penalized_loss; the penalty contributes 0 at w = 0.
LossGradient penalized_loss_gradient(const LinearHypothesis &h,
                                     const FeaturizedTrainingSet &rows,
                                     double lambda);

// Lowest (by object id) pair of rows sharing a feature vector but not a label.
// No 1NN hypothesis over `rows` is consistent exactly when such a pair exists.
std::optional<std::pair<std::size_t, std::size_t>>
conflicting_collision(const FeaturizedTrainingSet &rows);

// (w.v + b) / ||w||_2.
double signed_distance(const LinearHypothesis &h, std::span<const double> v);

// Feature set + hypothesis as a classifier of objects.
struct Classifier {
  FeatureSet features;
  Hypothesis hypothesis;

  Label operator()(const Object &x) const {
    return predict(hypothesis, featurize(features, x));
  }
};

} // namespace prederr
