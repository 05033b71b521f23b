#include "prederr/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace prederr {

using nlohmann::json;

double Rng::normal() {
  // Box-Muller on the portable uniform source.
  double u1 = uniform();
  while (u1 <= 0.0)
    u1 = uniform();
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::size_t Rng::index(std::size_t n) {
  auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

namespace {

std::string padded_id(const std::string &prefix, std::size_t i, std::size_t n) {
  std::size_t width = 2;
  for (std::size_t m = n; m >= 100; m /= 10)
    ++width;
  std::string digits = std::to_string(i);
  return prefix + std::string(width > digits.size() ? width - digits.size() : 0, '0') +
         digits;
}

double round4(double v) { return std::round(v * 1e4) / 1e4; }

std::vector<FeatureDef> projection_pool(std::size_t d) {
  std::vector<FeatureDef> defs;
  for (std::size_t j = 1; j <= d; ++j) {
    std::string name = "x" + std::to_string(j);
    defs.push_back({name, Expression::attribute(name)});
  }
  return defs;
}

std::vector<FeatureId> ids_of(const std::vector<FeatureDef> &defs) {
  std::vector<FeatureId> out;
  for (const auto &f : defs)
    out.push_back(f.id);
  return out;
}

struct PlainPoint {
  std::string id;
  std::vector<double> x;
  Label y;
};

Scenario from_points(std::string name, const std::vector<PlainPoint> &points,
                     std::size_t d, std::uint64_t seed) {
  Scenario s;
  s.name = std::move(name);
  s.seed = seed;
  std::vector<Object> objects;
  std::map<ObjectId, Label> target;
  for (const auto &p : points) {
    Object o{p.id, {}};
    for (std::size_t j = 0; j < d; ++j)
      o.attrs["x" + std::to_string(j + 1)] = p.x[j];
    objects.push_back(std::move(o));
    target[p.id] = p.y;
    s.initial_training.emplace_back(p.id, p.y);
  }
  s.universe = ObjectUniverse(std::move(objects));
  s.oracle = TargetOracle(std::move(target));
  auto pool = projection_pool(d);
  s.initial_features = ids_of(pool);
  s.pool = FeaturePool(std::move(pool));
  return s;
}

Scenario xor_base(bool with_product) {
  Scenario s;
  s.name = with_product ? "xor" : "xor-no-product";
  const std::array<std::pair<double, double>, 4> corners{
      {{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  std::vector<Object> objects;
  std::map<ObjectId, Label> target;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    auto [a, b] = corners[i];
    ObjectId id = "x" + std::to_string(i + 1);
    objects.push_back({id, {{"a", a}, {"b", b}}});
    Label y = (a != b) ? Label::one : Label::zero;
    target[id] = y;
    s.initial_training.emplace_back(id, y);
  }
  s.universe = ObjectUniverse(std::move(objects));
  s.oracle = TargetOracle(std::move(target));
  std::vector<FeatureDef> pool{{"a", Expression::attribute("a")},
                               {"b", Expression::attribute("b")}};
  if (with_product)
    pool.push_back({"ab", Expression::parse("a*b")});
  s.pool = FeaturePool(std::move(pool));
  s.initial_features = {"a", "b"};
  return s;
}

} // namespace

Scenario gen_xor() { return xor_base(true); }

Scenario gen_xor_without_product() { return xor_base(false); }

Scenario gen_separable(std::size_t n, std::size_t d, double margin,
                       std::uint64_t seed) {
  if (d == 0)
    throw std::invalid_argument("gen_separable needs d >= 1");
  if (!(margin > 0.0))
    throw std::invalid_argument("gen_separable needs a positive margin");
  Rng rng(seed);
  std::vector<double> w(d);
  double norm = 0.0;
  while (norm < 1e-6) {
    norm = 0.0;
    for (auto &v : w) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
  }
  for (auto &v : w)
    v /= norm;

  std::vector<PlainPoint> points;
  std::size_t attempts = 0;
  while (points.size() < n) {
    if (++attempts > 1'000'000)
      throw std::invalid_argument("gen_separable: margin too large to place points");
    std::vector<double> x(d);
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = round4(rng.uniform(-1.0, 1.0));
      z += w[j] * x[j];
    }
    if (std::abs(z) < margin)
      continue;
    points.push_back({padded_id("p", points.size(), n), std::move(x),
                      z > 0 ? Label::one : Label::zero});
  }
  auto s = from_points("separable", points, d, seed);
  s.planted = LinearHypothesis{w, 0.0};
  return s;
}

Scenario gen_random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0)
    throw std::invalid_argument("gen_random_points needs d >= 1");
  Rng rng(seed);
  std::set<std::vector<double>> seen;
  std::vector<PlainPoint> points;
  while (points.size() < n) {
    std::vector<double> x(d);
    for (auto &v : x)
      v = round4(rng.uniform());
    Label y = rng.uniform() < 0.5 ? Label::zero : Label::one;
    if (!seen.insert(x).second)
      continue;
    points.push_back({padded_id("r", points.size(), n), std::move(x), y});
  }
  return from_points("random", points, d, seed);
}

Scenario inject_mislabels(const Scenario &s, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("mislabel rate must lie in [0, 1]");
  Scenario out = s;
  const std::size_t n = out.initial_training.size();
  auto count = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n) - 1e-9));
  count = std::min(count, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i)
    std::swap(order[i], order[i + rng.index(n - i)]);
  std::set<ObjectId> flipped(out.flipped.begin(), out.flipped.end());
  for (std::size_t i = 0; i < count; ++i) {
    auto &[id, y] = out.initial_training[order[i]];
    y = flip(y);
    if (!flipped.insert(id).second)
      flipped.erase(id);
  }
  out.flipped.assign(flipped.begin(), flipped.end());
  return out;
}

Scenario inject_collisions(const Scenario &s, std::size_t count,
                           std::uint64_t seed) {
  Scenario out = s;
  const std::size_t n = s.initial_training.size();
  if (count > n)
    throw std::invalid_argument("more collisions requested than training examples");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i)
    std::swap(order[i], order[i + rng.index(n - i)]);

  auto objects = s.universe.objects();
  auto labeling = s.oracle.labeling();
  for (std::size_t i = 0; i < count; ++i) {
    const auto &orig_id = s.initial_training[order[i]].first;
    Object twin = s.universe.at(orig_id);
    twin.id = padded_id("c", i, count);
    Label y = flip(s.oracle(orig_id));
    labeling[twin.id] = y;
    out.initial_training.emplace_back(twin.id, y);
    objects.push_back(std::move(twin));
  }
  out.universe = ObjectUniverse(std::move(objects));
  out.oracle = TargetOracle(std::move(labeling));
  return out;
}

Scenario drop_initial_feature(const Scenario &s, const FeatureId &feature) {
  Scenario out = s;
  auto it = std::find(out.initial_features.begin(), out.initial_features.end(), feature);
  if (it == out.initial_features.end())
    throw std::invalid_argument("feature '" + feature + "' is not an initial feature");
  out.initial_features.erase(it);
  return out;
}

Scenario gen_figure1() {
  std::vector<PlainPoint> points{
      {"n01", {0.0, 0.0}, Label::zero},   {"n02", {0.5, 0.0}, Label::zero},
      {"n03", {0.0, 0.5}, Label::zero},   {"n04", {0.5, 0.5}, Label::zero},
      {"n05", {0.25, 0.25}, Label::zero}, {"n06", {-0.3, 0.2}, Label::zero},
      {"n07", {0.2, -0.3}, Label::zero},  {"p01", {3.0, 3.0}, Label::one},
      {"p02", {3.5, 3.0}, Label::one},    {"p03", {3.0, 3.5}, Label::one},
      {"p04", {3.5, 3.5}, Label::one},    {"p05", {3.25, 3.25}, Label::one},
      {"p06", {3.3, 2.8}, Label::one},    {"p07", {2.8, 3.3}, Label::one},
      {"p08", {0.75, 0.75}, Label::one},
  };
  return from_points("figure1", points, 2, 0);
}

Scenario gen_collision_fixture() {
  std::vector<PlainPoint> points{
      {"u1", {0.0, 0.0}, Label::zero}, {"u2", {0.0, 1.0}, Label::zero},
      {"u3", {3.0, 0.0}, Label::one},  {"u4", {3.0, 1.0}, Label::one},
      {"v1", {1.5, 0.5}, Label::zero}, {"v2", {1.5, 0.5}, Label::one},
  };
  return from_points("collision", points, 2, 0);
}

Scenario gen_empty() {
  Scenario s;
  s.name = "empty";
  return s;
}

std::vector<std::string> builtin_scenario_names() {
  return {"xor",       "xor-no-product", "figure1", "collision",
          "separable", "separable-mislabeled", "empty"};
}

Scenario builtin_scenario(const std::string &name) {
  if (name == "xor")
    return gen_xor();
  if (name == "xor-no-product")
    return gen_xor_without_product();
  if (name == "figure1")
    return gen_figure1();
  if (name == "collision")
    return gen_collision_fixture();
  if (name == "separable")
    return gen_separable(20, 2, 0.1, 7);
  if (name == "separable-mislabeled") {
    auto s = inject_mislabels(gen_separable(20, 2, 0.1, 7), 0.1, 11);
    s.name = name;
    return s;
  }
  if (name == "empty")
    return gen_empty();
  throw std::invalid_argument("unknown built-in scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// JSON

json scenario_to_json(const Scenario &s) {
  json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  json objects = json::array();
  for (const auto &o : s.universe.objects())
    objects.push_back({{"id", o.id}, {"attrs", o.attrs}});
  j["objects"] = std::move(objects);
  json target = json::object();
  for (const auto &[id, y] : s.oracle.labeling())
    target[id] = to_int(y);
  j["target"] = std::move(target);
  json pool = json::array();
  for (const auto &f : s.pool.defs())
    pool.push_back({{"id", f.id}, {"expr", f.expr.source()}});
  j["feature_pool"] = std::move(pool);
  json training = json::array();
  for (const auto &[id, y] : s.initial_training)
    training.push_back(json::array({id, to_int(y)}));
  j["initial_training"] = std::move(training);
  j["initial_features"] = s.initial_features;
  j["flipped"] = s.flipped;
  if (s.planted)
    j["planted"] = {{"w", s.planted->w}, {"b", s.planted->b}};
  return j;
}

namespace {

std::string escape_pointer(const std::string &token) {
  std::string out;
  for (char c : token) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

std::string at(const std::string &base, const std::string &token) {
  return base + "/" + escape_pointer(token);
}

std::string at(const std::string &base, std::size_t i) {
  return base + "/" + std::to_string(i);
}

const json &member(const json &obj, const std::string &key, const std::string &ptr) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ScenarioError("missing member '" + key + "'", ptr + "/" + key);
  return *it;
}

const json &expect(const json &v, json::value_t type, const char *what,
                   const std::string &ptr) {
  bool ok = v.type() == type ||
            (type == json::value_t::number_float && v.is_number());
  if (!ok)
    throw ScenarioError(std::string("expected ") + what, ptr);
  return v;
}

std::string expect_string(const json &v, const std::string &ptr) {
  if (!v.is_string())
    throw ScenarioError("expected a string", ptr);
  return v.get<std::string>();
}

Label expect_label(const json &v, const std::string &ptr) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ScenarioError("expected label 0 or 1", ptr);
  auto n = v.get<long long>();
  if (n != 0 && n != 1)
    throw ScenarioError("expected label 0 or 1, got " + std::to_string(n), ptr);
  return label_from_int(n);
}

} // namespace

Scenario scenario_from_json(const json &j) {
  if (!j.is_object())
    throw ScenarioError("scenario must be a JSON object", "");
  Scenario s;
  if (auto it = j.find("name"); it != j.end())
    s.name = expect_string(*it, "/name");
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer())
      throw ScenarioError("expected a non-negative integer", "/seed");
    s.seed = it->get<std::uint64_t>();
  }

  const auto &objs = expect(member(j, "objects", ""), json::value_t::array,
                            "an array", "/objects");
  std::vector<Object> objects;
  std::set<ObjectId> ids;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string ptr = at("/objects", i);
    expect(objs[i], json::value_t::object, "an object", ptr);
    Object o;
    o.id = expect_string(member(objs[i], "id", ptr), ptr + "/id");
    if (!ids.insert(o.id).second)
      throw ScenarioError("duplicate object id '" + o.id + "'", ptr + "/id");
    const auto &attrs = expect(member(objs[i], "attrs", ptr), json::value_t::object,
                               "an object", ptr + "/attrs");
    if (attrs.empty())
      throw ScenarioError("object has no attributes", ptr + "/attrs");
    for (const auto &[name, v] : attrs.items()) {
      const std::string aptr = at(ptr + "/attrs", name);
      if (!v.is_number())
        throw ScenarioError("expected a number", aptr);
      double x = v.get<double>();
      if (!std::isfinite(x))
        throw ScenarioError("attribute value is not finite", aptr);
      o.attrs[name] = x;
    }
    objects.push_back(std::move(o));
  }
  s.universe = ObjectUniverse(std::move(objects));

  const auto &tgt = expect(member(j, "target", ""), json::value_t::object,
                           "an object", "/target");
  std::map<ObjectId, Label> labeling;
  for (const auto &[id, v] : tgt.items()) {
    const std::string ptr = at("/target", id);
    if (!s.universe.contains(id))
      throw ScenarioError("target names unknown object '" + id + "'", ptr);
    labeling[id] = expect_label(v, ptr);
  }
  for (const auto &o : s.universe.objects())
    if (!labeling.count(o.id))
      throw ScenarioError("no target label for object '" + o.id + "'", "/target");
  s.oracle = TargetOracle(std::move(labeling));

  const auto &pool = expect(member(j, "feature_pool", ""), json::value_t::array,
                            "an array", "/feature_pool");
  std::vector<FeatureDef> defs;
  std::set<FeatureId> fids;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::string ptr = at("/feature_pool", i);
    expect(pool[i], json::value_t::object, "an object", ptr);
    FeatureDef f;
    f.id = expect_string(member(pool[i], "id", ptr), ptr + "/id");
    if (!fids.insert(f.id).second)
      throw ScenarioError("duplicate feature id '" + f.id + "'", ptr + "/id");
    std::string src = expect_string(member(pool[i], "expr", ptr), ptr + "/expr");
    try {
      f.expr = Expression::parse(src);
    } catch (const ExpressionParseError &e) {
      throw ScenarioError(e.what(), ptr + "/expr");
    }
    for (const auto &name : f.expr.attributes())
      for (const auto &o : s.universe.objects())
        if (!o.attrs.count(name))
          throw ScenarioError("feature '" + f.id + "' references unknown attribute '" +
                                  name + "' (missing on object '" + o.id + "')",
                              ptr + "/expr");
    for (const auto &o : s.universe.objects())
      if (!std::isfinite(f.expr.evaluate(o.attrs)))
        throw ScenarioError("feature '" + f.id + "' is not finite on object '" +
                                o.id + "'",
                            ptr + "/expr");
    defs.push_back(std::move(f));
  }
  s.pool = FeaturePool(std::move(defs));

  if (auto it = j.find("initial_training"); it != j.end()) {
    expect(*it, json::value_t::array, "an array", "/initial_training");
    std::set<ObjectId> seen;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string ptr = at("/initial_training", i);
      const auto &pair = (*it)[i];
      if (!pair.is_array() || pair.size() != 2)
        throw ScenarioError("expected [object-id, label]", ptr);
      auto id = expect_string(pair[0], ptr + "/0");
      if (!s.universe.contains(id))
        throw ScenarioError("unknown object '" + id + "'", ptr + "/0");
      if (!seen.insert(id).second)
        throw ScenarioError("object '" + id + "' labeled twice", ptr + "/0");
      s.initial_training.emplace_back(id, expect_label(pair[1], ptr + "/1"));
    }
  }

  if (auto it = j.find("initial_features"); it != j.end()) {
    expect(*it, json::value_t::array, "an array", "/initial_features");
    std::set<FeatureId> seen;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string ptr = at("/initial_features", i);
      auto id = expect_string((*it)[i], ptr);
      if (!s.pool.find(id))
        throw ScenarioError("feature '" + id + "' is not in the pool", ptr);
      if (!seen.insert(id).second)
        throw ScenarioError("feature '" + id + "' listed twice", ptr);
      s.initial_features.push_back(id);
    }
  }

  if (auto it = j.find("flipped"); it != j.end()) {
    expect(*it, json::value_t::array, "an array", "/flipped");
    for (std::size_t i = 0; i < it->size(); ++i) {
      auto id = expect_string((*it)[i], at("/flipped", i));
      if (!s.universe.contains(id))
        throw ScenarioError("unknown object '" + id + "'", at("/flipped", i));
      s.flipped.push_back(id);
    }
  }

  if (auto it = j.find("planted"); it != j.end()) {
    expect(*it, json::value_t::object, "an object", "/planted");
    const auto &w = expect(member(*it, "w", "/planted"), json::value_t::array, "an array",
                           "/planted/w");
    LinearHypothesis h;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w[i].is_number())
        throw ScenarioError("expected a number", at("/planted/w", i));
      h.w.push_back(w[i].get<double>());
    }
    const auto &b = member(*it, "b", "/planted");
    if (!b.is_number())
      throw ScenarioError("expected a number", "/planted/b");
    h.b = b.get<double>();
    s.planted = std::move(h);
  }
  return s;
}

std::string dump_scenario(const Scenario &s) { return scenario_to_json(s).dump(2) + "\n"; }

Scenario parse_scenario(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ScenarioError(e.what(), "byte " + std::to_string(e.byte));
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario(const Scenario &s, const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write scenario file '" + path + "'");
  out << dump_scenario(s);
}

} // namespace prederr
