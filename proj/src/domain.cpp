#include "prederr/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace prederr {

Label label_from_int(long long v) {
  if (v == 0)
    return Label::zero;
  if (v == 1)
    return Label::one;
  throw DomainError("label must be 0 or 1, got " + std::to_string(v));
}

ObjectUniverse::ObjectUniverse(std::vector<Object> objects)
    : objects_(std::move(objects)) {
  std::sort(objects_.begin(), objects_.end(),
            [](const Object &a, const Object &b) { return a.id < b.id; });
  for (std::size_t i = 0; i < objects_.size(); ++i) {
    const auto &o = objects_[i];
    if (i > 0 && objects_[i - 1].id == o.id)
      throw DomainError("duplicate object id '" + o.id + "'");
    if (o.attrs.empty())
      throw DomainError("object '" + o.id + "' has no attributes");
    for (const auto &[name, v] : o.attrs)
      if (!std::isfinite(v))
        throw DomainError("object '" + o.id + "' attribute '" + name +
                          "' is not finite");
  }
}

const Object *ObjectUniverse::find(const ObjectId &id) const {
  auto it = std::lower_bound(
      objects_.begin(), objects_.end(), id,
      [](const Object &o, const ObjectId &key) { return o.id < key; });
  if (it == objects_.end() || it->id != id)
    return nullptr;
  return &*it;
}

const Object &ObjectUniverse::at(const ObjectId &id) const {
  if (const auto *o = find(id))
    return *o;
  throw DomainError("unknown object id '" + id + "'");
}

double eval_feature(const FeatureDef &f, const Object &x) {
  try {
    return f.expr.evaluate(x.attrs);
  } catch (const EvaluationError &e) {
    throw EvaluationError("feature '" + f.id + "' on object '" + x.id +
                              "': " + e.what(),
                          e.attribute());
  }
}

FeaturePool::FeaturePool(std::vector<FeatureDef> defs) : defs_(std::move(defs)) {
  std::set<FeatureId> seen;
  for (const auto &f : defs_)
    if (!seen.insert(f.id).second)
      throw DomainError("duplicate feature id '" + f.id + "'");
}

const FeatureDef *FeaturePool::find(const FeatureId &id) const {
  auto it = std::find_if(defs_.begin(), defs_.end(),
                         [&](const FeatureDef &f) { return f.id == id; });
  return it == defs_.end() ? nullptr : &*it;
}

const FeatureDef &FeaturePool::at(const FeatureId &id) const {
  if (const auto *f = find(id))
    return *f;
  throw DomainError("unknown feature id '" + id + "'");
}

FeatureSet::FeatureSet(std::vector<FeatureDef> features)
    : features_(std::move(features)) {
  std::set<FeatureId> seen;
  for (const auto &f : features_)
    if (!seen.insert(f.id).second)
      throw DomainError("feature '" + f.id + "' selected twice");
}

FeatureSet FeatureSet::from_pool(const FeaturePool &pool,
                                 const std::vector<FeatureId> &ids) {
  std::vector<FeatureDef> defs;
  defs.reserve(ids.size());
  for (const auto &id : ids)
    defs.push_back(pool.at(id));
  return FeatureSet(std::move(defs));
}

std::vector<FeatureId> FeatureSet::ids() const {
  std::vector<FeatureId> out;
  out.reserve(features_.size());
  for (const auto &f : features_)
    out.push_back(f.id);
  return out;
}

bool FeatureSet::contains(const FeatureId &id) const {
  return std::any_of(features_.begin(), features_.end(),
                     [&](const FeatureDef &f) { return f.id == id; });
}

FeatureSet FeatureSet::with(const FeatureDef &f) const {
  auto defs = features_;
  defs.push_back(f);
  return FeatureSet(std::move(defs));
}

TrainingSet::TrainingSet(const std::vector<Example> &examples) {
  for (const auto &[id, y] : examples)
    if (!insert(id, y))
      throw DomainError("object '" + id + "' labeled twice");
}

bool TrainingSet::insert(const ObjectId &id, Label y) {
  return labels_.emplace(id, y).second;
}

void TrainingSet::relabel(const ObjectId &id, Label y) {
  auto it = labels_.find(id);
  if (it == labels_.end())
    throw DomainError("object '" + id + "' is not in the training set");
  it->second = y;
}

std::optional<Label> TrainingSet::label_of(const ObjectId &id) const {
  auto it = labels_.find(id);
  if (it == labels_.end())
    return std::nullopt;
  return it->second;
}

std::vector<Example> TrainingSet::examples() const {
  return {labels_.begin(), labels_.end()};
}

std::vector<ObjectId> TrainingSet::ids() const {
  std::vector<ObjectId> out;
  out.reserve(labels_.size());
  for (const auto &[id, y] : labels_)
    out.push_back(id);
  return out;
}

TrainingSet TrainingSet::subset(std::span<const ObjectId> ids) const {
  TrainingSet out;
  for (const auto &id : ids) {
    auto it = labels_.find(id);
    if (it == labels_.end())
      throw DomainError("object '" + id + "' is not in the training set");
    out.insert(it->first, it->second);
  }
  return out;
}

void FeaturizedTrainingSet::add_row(std::span<const double> x, Label y,
                                    ObjectId id) {
  if (x.size() != dim_)
    throw DomainError("row dimension " + std::to_string(x.size()) +
                      " does not match " + std::to_string(dim_));
  values_.insert(values_.end(), x.begin(), x.end());
  labels_.push_back(y);
  ids_.push_back(std::move(id));
}

FeaturizedTrainingSet
FeaturizedTrainingSet::select(std::span<const std::size_t> rows) const {
  FeaturizedTrainingSet out(dim_);
  for (auto i : rows)
    out.add_row(row(i), labels_[i], ids_[i]);
  return out;
}

Label TargetOracle::operator()(const ObjectId &id) const {
  auto it = labeling_.find(id);
  if (it == labeling_.end())
    throw DomainError("target labeling has no entry for '" + id + "'");
  return it->second;
}

bool TargetOracle::covers(const ObjectUniverse &universe) const {
  return std::all_of(universe.objects().begin(), universe.objects().end(),
                     [&](const Object &o) { return labeling_.count(o.id); });
}

std::vector<double> featurize(const FeatureSet &features, const Object &x) {
  std::vector<double> v;
  v.reserve(features.dim());
  for (const auto &f : features.features())
    v.push_back(eval_feature(f, x));
  return v;
}

FeaturizedTrainingSet featurize_training_set(const FeatureSet &features,
                                             const TrainingSet &training,
                                             const ObjectUniverse &universe) {
  FeaturizedTrainingSet out(features.dim());
  for (const auto &[id, y] : training)
    out.add_row(featurize(features, universe.at(id)), y, id);
  return out;
}

bool consistent_with(const ObjectClassifier &c, const TrainingSet &training,
                     const ObjectUniverse &universe) {
  return std::all_of(training.begin(), training.end(), [&](const auto &ex) {
    return c(universe.at(ex.first)) == ex.second;
  });
}

} // namespace prederr
