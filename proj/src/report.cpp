#include "prederr/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prederr {

using nlohmann::json;

json hypothesis_to_json(const Hypothesis &h) {
  return std::visit(
      [](const auto &x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, LinearHypothesis>) {
          return {{"kind", "linear"}, {"w", x.w}, {"b", x.b}};
        } else {
          json rows = json::array();
          for (std::size_t i = 0; i < x.rows.size(); ++i) {
            auto r = x.rows.row(i);
            rows.push_back({{"id", x.rows.id(i)},
                            {"x", std::vector<double>(r.begin(), r.end())},
                            {"label", to_int(x.rows.label(i))}});
          }
          return {{"kind", "memorized"},
                  {"k", x.k},
                  {"dim", x.rows.dim()},
                  {"rows", std::move(rows)}};
        }
      },
      h);
}

Hypothesis hypothesis_from_json(const json &j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "linear")
    return LinearHypothesis{j.at("w").get<std::vector<double>>(), j.at("b").get<double>()};
  if (kind == "memorized") {
    FeaturizedTrainingSet rows(j.at("dim").get<std::size_t>());
    for (const auto &r : j.at("rows")) {
      auto x = r.at("x").get<std::vector<double>>();
      rows.add_row(x, label_from_int(r.at("label").get<long long>()),
                   r.at("id").get<std::string>());
    }
    return MemorizedHypothesis(std::move(rows), j.at("k").get<int>());
  }
  throw std::invalid_argument("unknown hypothesis kind '" + kind + "'");
}

json examples_to_json(const std::vector<Example> &examples) {
  json out = json::array();
  for (const auto &[id, y] : examples)
    out.push_back(json::array({id, to_int(y)}));
  return out;
}

json training_to_json(const TrainingSet &t) { return examples_to_json(t.examples()); }

std::string verdict_string(const Diagnosis &d) {
  std::string s = to_string(d.category);
  if (d.subtype)
    s += "/" + to_string(*d.subtype);
  return s;
}

namespace {

json evidence_to_json(const Evidence &e) {
  return std::visit(
      [](const auto &v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, MislabelingEvidence>) {
          return {{"type", "mislabeled_examples"},
                  {"mislabeled", examples_to_json(v.mislabeled)}};
        } else if constexpr (std::is_same_v<T, RepresentationEvidence>) {
          return {{"type", v.kind == RepresentationEvidence::Kind::kirchberger
                               ? "non_separable_subset"
                               : "collision_pair"},
                  {"subset", examples_to_json(v.subset)},
                  {"minimum", v.minimum}};
        } else if constexpr (std::is_same_v<T, LearnerEvidence>) {
          json j{{"type", "loss_comparison"}};
          j["loss_returned"] = v.loss_returned ? json(*v.loss_returned) : json(nullptr);
          j["loss_consistent"] =
              v.loss_consistent ? json(*v.loss_consistent) : json(nullptr);
          j["consistent_hypothesis"] =
              v.consistent ? hypothesis_to_json(*v.consistent) : json(nullptr);
          return j;
        } else {
          return {{"type", "retrained"},
                  {"added", json::array({v.added.first, to_int(v.added.second)})}};
        }
      },
      e);
}

} // namespace

json invalidation_to_json(const InvalidationSet &inv) {
  return {{"cardinality", inv.cardinality()},
          {"bound", inv.bound},
          {"within_bound", inv.cardinality() <= inv.bound},
          {"minimum", inv.minimum},
          {"subset", training_to_json(inv.subset)}};
}

json diagnosis_to_json(const Diagnosis &d, const std::optional<InvalidationSet> &inv) {
  json j;
  j["object_id"] = d.object_id;
  j["category"] = to_string(d.category);
  if (d.subtype)
    j["subtype"] = to_string(*d.subtype);
  j["verdict"] = verdict_string(d);
  j["evidence"] = evidence_to_json(d.evidence);
  j["hypothesis_before"] = hypothesis_to_json(d.hypothesis_before);
  if (d.hypothesis_after)
    j["hypothesis_after"] = hypothesis_to_json(*d.hypothesis_after);
  if (inv)
    j["invalidation_set"] = invalidation_to_json(*inv);
  return j;
}

Box bounding_box(const std::vector<std::array<double, 2>> &points, double pad) {
  if (points.empty())
    return {-1.0, 1.0, -1.0, 1.0};
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto &p : points) {
    b.x_min = std::min(b.x_min, p[0]);
    b.x_max = std::max(b.x_max, p[0]);
    b.y_min = std::min(b.y_min, p[1]);
    b.y_max = std::max(b.y_max, p[1]);
  }
  double dx = std::max(b.x_max - b.x_min, 1.0) * pad;
  double dy = std::max(b.y_max - b.y_min, 1.0) * pad;
  return {b.x_min - dx, b.x_max + dx, b.y_min - dy, b.y_max + dy};
}

std::vector<std::array<double, 2>> linear_boundary(const LinearHypothesis &h,
                                                   const Box &box, std::size_t samples) {
  if (h.w.size() != 2 || samples < 2)
    throw std::invalid_argument("boundary polylines need a 2-D hypothesis");
  const double a = h.w[0], c = h.w[1], b = h.b;
  if (a == 0.0 && c == 0.0)
    return {};
  // Candidate crossings of the line with the four box edges.
  std::vector<std::array<double, 2>> hits;
  auto add = [&](double x, double y) {
    const double eps = 1e-12 * (1.0 + std::abs(x) + std::abs(y));
    if (x < box.x_min - eps || x > box.x_max + eps || y < box.y_min - eps ||
        y > box.y_max + eps)
      return;
    for (const auto &p : hits)
      if (std::abs(p[0] - x) <= eps && std::abs(p[1] - y) <= eps)
        return;
    hits.push_back({x, y});
  };
  if (c != 0.0) {
    add(box.x_min, -(b + a * box.x_min) / c);
    add(box.x_max, -(b + a * box.x_max) / c);
  }
  if (a != 0.0) {
    add(-(b + c * box.y_min) / a, box.y_min);
    add(-(b + c * box.y_max) / a, box.y_max);
  }
  if (hits.size() < 2)
    return {};
  std::sort(hits.begin(), hits.end());
  const auto p = hits.front(), q = hits.back();
  std::vector<std::array<double, 2>> out;
  for (std::size_t i = 0; i < samples; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(samples - 1);
    out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
  }
  return out;
}

} // namespace prederr
