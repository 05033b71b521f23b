#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "prederr/domain.hpp"
#include "prederr/learners.hpp"

namespace prederr {

enum class ErrorCategory { mislabeling, representation, learner, boundary };
enum class LearnerSubtype { optimization, objective };

std::string to_string(ErrorCategory c);
std::string to_string(LearnerSubtype s);

// Examples of T whose label disagrees with the oracle, as stored in T.
struct MislabelingEvidence {
  std::vector<Example> mislabeled;
};

// A non-realizable subset of the (augmented) training set.
struct RepresentationEvidence {
  enum class Kind { kirchberger, collision };
  Kind kind = Kind::kirchberger;
  std::vector<Example> subset;
  // False when only an inclusion-minimal subset could be afforded.
  bool minimum = true;
};

struct LearnerEvidence {
  // Penalized losses of the returned and the best consistent hypothesis;
  // absent for memorizing learners.
  std::optional<double> loss_returned;
  std::optional<double> loss_consistent;
  std::optional<LinearHypothesis> consistent;
};

struct BoundaryEvidence {
  Example added;
};

using Evidence = std::variant<MislabelingEvidence, RepresentationEvidence,
                              LearnerEvidence, BoundaryEvidence>;

struct Diagnosis {
  ObjectId object_id;
  ErrorCategory category = ErrorCategory::mislabeling;
  std::optional<LearnerSubtype> subtype;
  Evidence evidence;
  Hypothesis hypothesis_before;
  std::optional<Hypothesis> hypothesis_after;
};

class UnregisteredLearner : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InternalInconsistency : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// Decides whether the learner's hypothesis class contains a classifier
// consistent with the rows, and if not names a non-realizable subset.
struct RealizabilityCheck {
  std::function<bool(const FeaturizedTrainingSet &)> realizable;
  std::function<RepresentationEvidence(const FeaturizedTrainingSet &)> witness;
};

class RealizabilityRegistry {
public:
  // Separability for the logistic family, collision check for the NN family.
  static const RealizabilityRegistry &standard();

  void add(LearnerKind kind, RealizabilityCheck check);
  void remove(LearnerKind kind);
  const RealizabilityCheck &at(LearnerKind kind) const;

private:
  std::map<LearnerKind, RealizabilityCheck> checks_;
};

bool is_realizable(const FeaturizedTrainingSet &rows, LearnerKind kind,
                   const RealizabilityRegistry &registry =
                       RealizabilityRegistry::standard());

struct DiagnosisContext {
  const ObjectUniverse &universe;
  const TargetOracle &oracle;
  const RealizabilityRegistry &registry = RealizabilityRegistry::standard();
};

// First object of T (by id) whose prediction disagrees with the oracle.
std::optional<ObjectId> first_training_error(const DiagnosisContext &ctx,
                                             const TrainingSet &training,
                                             const FeatureSet &features,
                                             const LearnerSpec &spec);

// Mislabeling, then Learner if realizable, else Representation. Empty when
// no example of T is mispredicted. `object` defaults to the first error.
std::optional<Diagnosis>
classify_training_error(const DiagnosisContext &ctx, const TrainingSet &training,
                        const FeatureSet &features, const LearnerSpec &spec,
                        const std::optional<ObjectId> &object = std::nullopt);

// Empty when x is predicted correctly. Objects outside T are first checked for
// a boundary error by retraining on T plus (x, c*(x)).
std::optional<Diagnosis> classify_prediction_error(const DiagnosisContext &ctx,
                                                   const ObjectId &x,
                                                   const TrainingSet &training,
                                                   const FeatureSet &features,
                                                   const LearnerSpec &spec);

struct LearnerSplit {
  LearnerSubtype subtype = LearnerSubtype::objective;
  LearnerEvidence evidence;
};

inline constexpr double kLossGapTolerance = 1e-9;

// Optimization when a consistent hypothesis with lower penalized loss than the
// fitted one is found, else Objective. Rows must be realizable.
LearnerSplit split_learner_error(const FeaturizedTrainingSet &rows,
                                 const LearnerSpec &spec);

// Lowest-loss consistent linear hypothesis found by scaling the separating
// witness and then descending while staying consistent.
LinearHypothesis best_consistent_linear(const FeaturizedTrainingSet &rows,
                                        double lambda);

} // namespace prederr
