#include "prederr/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "prederr/diagnosis.hpp"
#include "prederr/invalidation.hpp"
#include "prederr/protocol.hpp"
#include "prederr/report.hpp"
#include "prederr/scenarios.hpp"
#include "prederr/service.hpp"

namespace prederr::cli {

namespace {

using nlohmann::json;

struct Failure {
  int code;
  std::string message;
};

struct LearnerOptions {
  std::string learner;
  double lambda = 0.0;
  int k = 3;

  LearnerSpec spec() const {
    try {
      LearnerSpec s;
      s.kind = learner_kind_from_string(learner);
      if (s.kind == LearnerKind::logreg_reg)
        s.lambda = lambda;
      else if (lambda != 0.0)
        throw InvalidLearnerSpec("--lambda only applies to logreg-reg");
      if (s.kind == LearnerKind::knn)
        s.k = k;
      s.validate();
      return s;
    } catch (const InvalidLearnerSpec &e) {
      throw Failure{usage, e.what()};
    }
  }
};

void add_learner_options(CLI::App *cmd, LearnerOptions &o) {
  cmd->add_option("--learner", o.learner, "logreg-ml, logreg-reg, 1nn or knn")->required();
  cmd->add_option("--lambda", o.lambda, "regularization strength (logreg-reg)");
  cmd->add_option("--k", o.k, "neighbour count (knn, odd)");
}

Scenario resolve_scenario(const std::string &ref) {
  const std::string prefix = "builtin:";
  try {
    if (ref.rfind(prefix, 0) == 0)
      return builtin_scenario(ref.substr(prefix.size()));
    if (!std::filesystem::exists(ref))
      throw Failure{environment, "scenario file '" + ref + "' not found"};
    return load_scenario(ref);
  } catch (const ScenarioError &e) {
    throw Failure{usage, "invalid scenario '" + ref + "': " + e.what()};
  } catch (const std::invalid_argument &e) {
    throw Failure{usage, e.what()};
  } catch (const EvaluationError &e) {
    throw Failure{usage, e.what()};
  } catch (const DomainError &e) {
    throw Failure{usage, e.what()};
  }
}

void emit(const std::string &text, const std::string &path, std::ostream &out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f)
    throw Failure{environment, "cannot write '" + path + "'"};
  f << text;
}

std::optional<InvalidationSet> invalidation_or_greedy(const Scenario &s,
                                                      const TrainingSet &t,
                                                      const FeatureSet &f,
                                                      const LearnerSpec &spec,
                                                      std::uint64_t budget) {
  try {
    return find_invalidation_set(s.universe, t, f, spec, InvalidationMode::exact, budget);
  } catch (const BudgetExceeded &) {
    return find_invalidation_set(s.universe, t, f, spec, InvalidationMode::greedy);
  }
}

int cmd_diagnose(const std::string &ref, const LearnerOptions &lo, const std::string &object,
                 std::uint64_t budget, const std::string &out_path, std::ostream &out,
                 std::ostream &err) {
  auto s = resolve_scenario(ref);
  auto spec = lo.spec();
  auto t = s.training();
  auto f = s.features();
  DiagnosisContext ctx{s.universe, s.oracle};

  std::optional<Diagnosis> d;
  if (!object.empty()) {
    if (!s.universe.contains(object))
      throw Failure{usage, "unknown object '" + object + "'"};
    d = classify_prediction_error(ctx, object, t, f, spec);
  } else {
    d = classify_training_error(ctx, t, f, spec);
    for (const auto &o : s.universe.objects()) {
      if (d)
        break;
      if (!t.contains(o.id))
        d = classify_prediction_error(ctx, o.id, t, f, spec);
    }
  }
  if (!d) {
    err << "no prediction error found\n";
    return no_error_found;
  }
  std::optional<InvalidationSet> inv;
  if (t.contains(d->object_id))
    inv = invalidation_or_greedy(s, t, f, spec, budget);
  emit(diagnosis_to_json(*d, inv).dump(2) + "\n", out_path, out);
  err << d->object_id << ": " << verdict_string(*d) << "\n";
  return success;
}

int cmd_teach(const std::string &ref, const LearnerOptions &lo, const std::string &teacher,
              std::int64_t max_rounds, const std::string &out_path, std::ostream &out,
              std::ostream &err) {
  if (teacher != "oracle")
    throw Failure{usage, "only --teacher oracle is available from the command line"};
  auto s = resolve_scenario(ref);
  auto spec = lo.spec();
  if (!spec.is_consistent())
    throw Failure{usage, "teaching requires a consistent learner (logreg-ml or 1nn)"};
  std::uint64_t rounds = max_rounds >= 0 ? static_cast<std::uint64_t>(max_rounds)
                                         : std::max<std::uint64_t>(1, 10 * s.universe.size());
  auto run = run_with_oracle_teacher(s, spec, rounds);
  emit(events_to_jsonl(run.session.events()), out_path, out);

  const auto &session = run.session;
  err << "outcome " << to_string(session.outcome()) << ", rounds " << session.round()
      << ", features [";
  auto ids = session.features().ids();
  for (std::size_t i = 0; i < ids.size(); ++i)
    err << (i ? ", " : "") << ids[i];
  err << "], universe errors " << session.universe_errors(s.oracle).size() << "\n";
  if (session.outcome() == Outcome::not_realizable)
    return not_realizable;
  return run.done && run.zero_errors ? success : incomplete;
}

int cmd_invalidate(const std::string &ref, const LearnerOptions &lo, const std::string &mode,
                   std::uint64_t budget, const std::string &out_path, std::ostream &out,
                   std::ostream &err) {
  auto s = resolve_scenario(ref);
  auto spec = lo.spec();
  InvalidationMode m;
  try {
    m = invalidation_mode_from_string(mode);
  } catch (const std::invalid_argument &e) {
    throw Failure{usage, e.what()};
  }
  std::optional<InvalidationSet> inv;
  try {
    inv = find_invalidation_set(s.universe, s.training(), s.features(), spec, m, budget);
  } catch (const BudgetExceeded &e) {
    throw Failure{usage, e.what()};
  }
  if (!inv) {
    err << "no training error, so no invalidation set\n";
    return no_error_found;
  }
  json j = invalidation_to_json(*inv);
  j["learner"] = to_string(spec.kind);
  j["mode"] = to_string(m);
  j["features"] = s.features().ids();
  emit(j.dump(2) + "\n", out_path, out);
  err << "invalidation set of " << inv->cardinality() << " (bound " << inv->bound << ")\n";
  return success;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

int cmd_figure1(const std::string &out_path, std::ostream &out, std::ostream &err) {
  const std::array<double, 3> lambdas{0.0, 0.5, 1.0};
  auto label = [](double l) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << l;
    return s.str();
  };
  auto s = gen_figure1();
  auto rows = featurize_training_set(s.features(), s.training(), s.universe);

  std::vector<LinearHypothesis> hyps;
  for (double l : lambdas) {
    auto spec = l == 0.0 ? LearnerSpec::logreg_ml() : LearnerSpec::logreg_reg(l);
    hyps.push_back(std::get<LinearHypothesis>(fit(spec, rows)));
  }

  std::filesystem::path points_path(out_path);
  auto dir = points_path.parent_path();
  auto sibling = [&](const std::string &name) { return (dir / name).string(); };

  std::ostringstream points;
  points << "x1,x2,label";
  for (double l : lambdas)
    points << ",pred_lambda_" << label(l);
  points << "\n";
  std::vector<std::array<double, 2>> plane;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto x = rows.row(i);
    plane.push_back({x[0], x[1]});
    points << num(x[0]) << "," << num(x[1]) << "," << to_int(rows.label(i));
    for (const auto &h : hyps)
      points << "," << to_int(predict(h, x));
    points << "\n";
  }
  emit(points.str(), out_path, out);

  std::ostringstream table;
  table << "lambda,w1,w2,b,training_errors\n";
  json summary{{"points", out_path}, {"hypotheses", sibling("hypotheses.csv")}};
  json boundaries = json::array();
  const Box box = bounding_box(plane);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const auto &h = hyps[k];
    auto errors = training_errors(h, rows).size();
    table << label(lambdas[k]) << "," << num(h.w[0]) << "," << num(h.w[1]) << ","
          << num(h.b) << "," << errors << "\n";
    std::ostringstream line;
    line << "x1,x2\n";
    for (const auto &p : linear_boundary(h, box))
      line << num(p[0]) << "," << num(p[1]) << "\n";
    auto path = sibling("boundary_" + label(lambdas[k]) + ".csv");
    emit(line.str(), path, out);
    boundaries.push_back(path);
    err << "lambda " << label(lambdas[k]) << ": training errors " << errors << "\n";
  }
  emit(table.str(), sibling("hypotheses.csv"), out);
  summary["boundaries"] = std::move(boundaries);
  out << summary.dump(2) << "\n";
  return success;
}

int cmd_gen(const std::string &kind, std::size_t n, std::size_t d, double margin,
            std::uint64_t seed, double mislabel_rate, std::uint64_t mislabel_seed,
            const std::string &out_path, std::ostream &out) {
  Scenario s;
  try {
    if (kind == "separable")
      s = gen_separable(n, d, margin, seed);
    else if (kind == "random")
      s = gen_random_points(n, d, seed);
    else
      s = builtin_scenario(kind);
    if (mislabel_rate > 0.0)
      s = inject_mislabels(s, mislabel_rate, mislabel_seed);
  } catch (const std::invalid_argument &e) {
    throw Failure{usage, e.what()};
  }
  emit(dump_scenario(s), out_path, out);
  return success;
}

int cmd_serve(const std::string &host, int port, std::ostream &out) {
  SessionService service;
  HttpServer server(service);
  int bound = 0;
  try {
    bound = server.bind(host, port);
  } catch (const PortUnavailable &e) {
    throw Failure{environment, e.what()};
  }
  out << "listening on http://" << host << ":" << bound << std::endl;
  server.listen();
  return success;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Prediction-error diagnosis and error-driven teaching"};
  app.require_subcommand(1);

  std::string scenario, out_path, object, mode = "exact", teacher = "oracle";
  std::uint64_t budget = kDefaultSubsetBudget;
  std::int64_t max_rounds = -1;
  LearnerOptions lo;

  auto *diagnose = app.add_subcommand("diagnose", "classify a prediction error");
  diagnose->add_option("scenario", scenario, "scenario file or builtin:<name>")->required();
  add_learner_options(diagnose, lo);
  diagnose->add_option("--object", object, "object to diagnose (default: first error)");
  diagnose->add_option("--budget", budget, "exact invalidation search budget");
  diagnose->add_option("--out", out_path, "write the report here instead of stdout");

  auto *teach = app.add_subcommand("teach", "run the teaching protocol");
  teach->add_option("scenario", scenario, "scenario file or builtin:<name>")->required();
  add_learner_options(teach, lo);
  teach->add_option("--teacher", teacher, "teacher (oracle)");
  teach->add_option("--max-rounds", max_rounds, "round limit (default 10 x objects)");
  teach->add_option("--out", out_path, "write the event log here instead of stdout");

  auto *invalidate = app.add_subcommand("invalidate", "find an invalidation set");
  invalidate->add_option("scenario", scenario, "scenario file or builtin:<name>")->required();
  add_learner_options(invalidate, lo);
  invalidate->add_option("--mode", mode, "exact or greedy");
  invalidate->add_option("--budget", budget, "exact search budget (subsets)");
  invalidate->add_option("--out", out_path, "write the report here instead of stdout");

  std::string figure_out = "figure1.csv";
  auto *figure1 = app.add_subcommand("figure1", "regularization inconsistency tables");
  figure1->add_option("--out", figure_out, "points CSV; other files go next to it");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto *serve = app.add_subcommand("serve", "run the teaching session service");
  serve->add_option("--port", port, "port (0 = any free port)");
  serve->add_option("--host", host, "interface to bind");

  std::string gen_kind;
  std::size_t gen_n = 40, gen_d = 2;
  double gen_margin = 0.1, gen_rate = 0.0;
  std::uint64_t gen_seed = 1, gen_mislabel_seed = 1;
  auto *gen = app.add_subcommand("gen", "write a generated scenario");
  gen->add_option("kind", gen_kind, "separable, random or a built-in name")->required();
  gen->add_option("--n", gen_n, "number of points");
  gen->add_option("--d", gen_d, "dimension");
  gen->add_option("--margin", gen_margin, "distance from the planted hyperplane");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--mislabel-rate", gen_rate, "fraction of labels to flip");
  gen->add_option("--mislabel-seed", gen_mislabel_seed, "seed for the flips");
  gen->add_option("--out", out_path, "write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return success;
  } catch (const CLI::ParseError &e) {
    err << e.what() << "\n";
    return usage;
  }

  try {
    if (*diagnose)
      return cmd_diagnose(scenario, lo, object, budget, out_path, out, err);
    if (*teach)
      return cmd_teach(scenario, lo, teacher, max_rounds, out_path, out, err);
    if (*invalidate)
      return cmd_invalidate(scenario, lo, mode, budget, out_path, out, err);
    if (*figure1)
      return cmd_figure1(figure_out, out, err);
    if (*gen)
      return cmd_gen(gen_kind, gen_n, gen_d, gen_margin, gen_seed, gen_rate,
                     gen_mislabel_seed, out_path, out);
    if (*serve)
      return cmd_serve(host, port, out);
  } catch (const Failure &f) {
    err << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return usage;
  }
  return usage;
}

} // namespace prederr::cli
