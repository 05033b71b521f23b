#pragma once

#include <array>
#include <optional>
#include <vector>

#include "json.hpp"
#include "prederr/diagnosis.hpp"
#include "prederr/invalidation.hpp"
#include "prederr/learners.hpp"

namespace prederr {

// {kind: "linear", w, b} or {kind: "memorized", k, rows: [{id, x, label}]}.
nlohmann::json hypothesis_to_json(const Hypothesis &h);
Hypothesis hypothesis_from_json(const nlohmann::json &j);

nlohmann::json examples_to_json(const std::vector<Example> &examples);
nlohmann::json training_to_json(const TrainingSet &t);

// "learner/objective", "representation", ...
std::string verdict_string(const Diagnosis &d);

// {object_id, category, subtype?, verdict, evidence, hypothesis_before,
//  hypothesis_after?, invalidation_set?}
nlohmann::json diagnosis_to_json(const Diagnosis &d,
                                 const std::optional<InvalidationSet> &inv = std::nullopt);

nlohmann::json invalidation_to_json(const InvalidationSet &inv);

struct Box {
  double x_min, x_max, y_min, y_max;
};

// Bounding box of 2-D points padded by `pad` of its extent on each side.
Box bounding_box(const std::vector<std::array<double, 2>> &points, double pad = 0.1);

// The line w.v + b = 0 clipped to the box and sampled at `samples` evenly
// spaced points; empty when w = 0 or the line misses the box.
std::vector<std::array<double, 2>> linear_boundary(const LinearHypothesis &h,
                                                   const Box &box,
                                                   std::size_t samples = 50);

} // namespace prederr
