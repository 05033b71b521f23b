#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prederr/expression.hpp"

namespace prederr {

using ObjectId = std::string;
using FeatureId = std::string;

enum class Label : std::uint8_t { zero = 0, one = 1 };

inline Label flip(Label y) { return y == Label::zero ? Label::one : Label::zero; }
inline int to_int(Label y) { return static_cast<int>(y); }
Label label_from_int(long long v);

class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A raw object: named numeric attributes, not features.
struct Object {
  ObjectId id;
  std::map<std::string, double> attrs;
};

// Objects kept sorted by id; ids unique, attrs non-empty and finite.
class ObjectUniverse {
public:
  ObjectUniverse() = default;
  explicit ObjectUniverse(std::vector<Object> objects);

  const std::vector<Object> &objects() const { return objects_; }
  std::size_t size() const { return objects_.size(); }
  bool empty() const { return objects_.empty(); }
  bool contains(const ObjectId &id) const { return find(id) != nullptr; }
  const Object *find(const ObjectId &id) const;
  const Object &at(const ObjectId &id) const;

private:
  std::vector<Object> objects_;
};

struct FeatureDef {
  FeatureId id;
  Expression expr;

  double operator()(const Object &x) const { return expr.evaluate(x.attrs); }
};

double eval_feature(const FeatureDef &f, const Object &x);

// The declared pool of teachable features.
class FeaturePool {
public:
  FeaturePool() = default;
  explicit FeaturePool(std::vector<FeatureDef> defs);

  const std::vector<FeatureDef> &defs() const { return defs_; }
  std::size_t size() const { return defs_.size(); }
  const FeatureDef *find(const FeatureId &id) const;
  const FeatureDef &at(const FeatureId &id) const;

private:
  std::vector<FeatureDef> defs_;
};

// Ordered selection of features; order defines the coordinate order.
class FeatureSet {
public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<FeatureDef> features);
  static FeatureSet from_pool(const FeaturePool &pool,
                              const std::vector<FeatureId> &ids);

  std::size_t dim() const { return features_.size(); }
  const std::vector<FeatureDef> &features() const { return features_; }
  std::vector<FeatureId> ids() const;
  bool contains(const FeatureId &id) const;
  FeatureSet with(const FeatureDef &f) const;

private:
  std::vector<FeatureDef> features_;
};

using Example = std::pair<ObjectId, Label>;

// At most one label per object; iteration order is the canonical id order.
class TrainingSet {
public:
  TrainingSet() = default;
  explicit TrainingSet(const std::vector<Example> &examples);

  bool insert(const ObjectId &id, Label y);
  void relabel(const ObjectId &id, Label y);
  bool contains(const ObjectId &id) const { return labels_.count(id) != 0; }
  std::optional<Label> label_of(const ObjectId &id) const;
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::vector<Example> examples() const;
  std::vector<ObjectId> ids() const;
  TrainingSet subset(std::span<const ObjectId> ids) const;

  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }

  friend bool operator==(const TrainingSet &, const TrainingSet &) = default;

private:
  std::map<ObjectId, Label> labels_;
};

// Dense row-major featurized rows in canonical object-id order.
class FeaturizedTrainingSet {
public:
  FeaturizedTrainingSet() = default;
  explicit FeaturizedTrainingSet(std::size_t dim) : dim_(dim) {}

  void add_row(std::span<const double> x, Label y, ObjectId id);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  Label label(std::size_t i) const { return labels_[i]; }
  const ObjectId &id(std::size_t i) const { return ids_[i]; }
  const std::vector<double> &values() const { return values_; }
  const std::vector<Label> &labels() const { return labels_; }
  const std::vector<ObjectId> &ids() const { return ids_; }

  FeaturizedTrainingSet select(std::span<const std::size_t> rows) const;

  friend bool operator==(const FeaturizedTrainingSet &,
                         const FeaturizedTrainingSet &) = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<Label> labels_;
  std::vector<ObjectId> ids_;
};

// c*: total map from object id to label.
class TargetOracle {
public:
  TargetOracle() = default;
  explicit TargetOracle(std::map<ObjectId, Label> labeling)
      : labeling_(std::move(labeling)) {}

  Label operator()(const ObjectId &id) const;
  const std::map<ObjectId, Label> &labeling() const { return labeling_; }
  bool covers(const ObjectUniverse &universe) const;

private:
  std::map<ObjectId, Label> labeling_;
};

std::vector<double> featurize(const FeatureSet &features, const Object &x);

FeaturizedTrainingSet featurize_training_set(const FeatureSet &features,
                                             const TrainingSet &training,
                                             const ObjectUniverse &universe);

using ObjectClassifier = std::function<Label(const Object &)>;

bool consistent_with(const ObjectClassifier &c, const TrainingSet &training,
                     const ObjectUniverse &universe);

} // namespace prederr
