#include "fairweight/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "fairweight/error.hpp"
#include "fairweight/learners.hpp"
#include "fairweight/multitune.hpp"
#include "fairweight/tuning.hpp"

namespace fairweight::cli {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json number(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const json& document) {
  write_text(path, document.dump(2) + "\n");
}

json indices_json(const IndexSet& indices) { return json(indices); }

// Count behind each metric's denominator, for the audit noise bound.
std::size_t denominator(MetricKind kind, const IndexSet& group, const Dataset& dataset,
                        std::span<const int> predictions) {
  std::size_t count = 0;
  for (std::size_t i : group) {
    switch (kind) {
      case MetricKind::FPR: count += dataset.label(i) == 0; break;
      case MetricKind::FNR: count += dataset.label(i) == 1; break;
      case MetricKind::FOR: count += predictions[i] == 0; break;
      case MetricKind::FDR: count += predictions[i] == 1; break;
      default: ++count; break;
    }
  }
  return count;
}

// AP and each constraint's gap on one split.
json score(const Dataset& dataset, const GroupAssignment& groups,
           const std::vector<FairnessConstraint>& constraints, const IndexSet& scope,
           std::span<const int> predictions) {
  const GroupAssignment local = groups.restricted_to(scope);
  json fp = json::object();
  json satisfied = json::object();
  for (const auto& c : constraints) {
    try {
      const double gap = fairness_gap(c, dataset, local, predictions);
      fp[c.id] = number(gap);
      satisfied[c.id] = std::abs(gap) <= c.epsilon;
    } catch (const Error& e) {
      fp[c.id] = nullptr;
      satisfied[c.id] = false;
    }
  }
  return {{"ap", accuracy(dataset, scope, predictions)}, {"fp", fp}, {"satisfied", satisfied}};
}

json lambdas_json(const LambdaVector& lambdas, const std::vector<FairnessConstraint>& constraints) {
  json out = json::object();
  for (const auto& c : constraints) {
    const auto it = lambdas.find(c.id);
    out[c.id] = it == lambdas.end() ? 0.0 : it->second;
  }
  return out;
}

json constraint_json(const FairnessConstraint& c) {
  return {{"id", c.id}, {"metric", c.metric.name()}, {"g1", c.g1}, {"g2", c.g2},
          {"epsilon", c.epsilon}};
}

json config_summary(const Pipeline& p) {
  json constraints = json::array();
  for (const auto& c : p.constraints) constraints.push_back(constraint_json(c));
  return {{"data", p.config.data_path.string()},
          {"seed", p.config.seed},
          {"learner", p.learner->kind()},
          {"rows", p.dataset->size()},
          {"features", p.dataset->feature_names()},
          {"split_sizes",
           {{"train", p.split.train.size()},
            {"validation", p.split.validation.size()},
            {"test", p.split.test.size()}}},
          {"constraints", constraints}};
}

void write_model(const std::filesystem::path& path, const TrainedModel& model, const Pipeline& p) {
  json document = {{"format", "fairweight-model"},
                   {"version", 1},
                   {"learner", model.kind()},
                   {"feature_names", p.dataset->feature_names()},
                   {"label", p.dataset->label_name()},
                   {"model", model.to_json()}};
  write_json(path, document);
}

void write_split(const std::filesystem::path& path, const Pipeline& p) {
  write_json(path, {{"seed", p.config.split.seed},
                    {"train", indices_json(p.split.train)},
                    {"validation", indices_json(p.split.validation)},
                    {"test", indices_json(p.split.test)}});
}

void require_constraints(const Pipeline& p) {
  if (p.constraints.empty()) {
    throw Error(ErrorCode::ConfigError,
                "no constraints: give constraint.<id>.* entries or fairness.epsilon");
  }
}

struct SweepRow {
  double epsilon = 0.0;
  double lambda = NAN;
  double validation_ap = NAN;
  double validation_fp = NAN;
  double test_ap = NAN;
  double test_fp = NAN;
  // Unknown when the tuner gave up at the cap.
  std::optional<std::size_t> fits;
  double seconds = 0.0;
  bool satisfied = false;
  std::string error;
};

SweepRow sweep_row(const Pipeline& p, double epsilon) {
  SweepRow row;
  row.epsilon = epsilon;
  const auto start = Clock::now();
  FairnessConstraint constraint = p.constraints.front();
  constraint.epsilon = epsilon;
  try {
    const TuneResult result =
        tune_single(*p.dataset, p.split, p.groups, constraint, *p.learner, p.config.tuner);
    const Predictions predictions = result.model->predict_all(*p.dataset);
    row.lambda = result.lambda;
    row.validation_ap = result.validation_ap;
    row.validation_fp = result.validation_fp;
    row.test_ap = accuracy(*p.dataset, p.split.test, predictions);
    row.test_fp = fairness_gap(constraint, *p.dataset, p.groups.restricted_to(p.split.test),
                               predictions);
    row.fits = result.fits;
    row.satisfied = result.satisfied;
  } catch (const Error& e) {
    row.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  row.seconds = seconds_since(start);
  return row;
}

}  // namespace

std::unique_ptr<WeightedLearner> make_learner(const RunConfig& config) {
  if (config.learner_kind == "logreg") return std::make_unique<LogisticRegression>(config.logreg);
  if (config.learner_kind == "tree") return std::make_unique<DecisionTree>(config.tree);
  throw Error(ErrorCode::ConfigError, "unknown learner kind '" + config.learner_kind + "'");
}

Pipeline prepare(const RunConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  Pipeline p;
  p.config = config;
  p.dataset = std::make_shared<const Dataset>(load_csv(config.data_path, config.csv));
  p.split = split(*p.dataset, config.split);
  p.groups = assign_groups(*p.dataset, config.grouping);
  for (const auto& entry : config.constraints) {
    for (const auto* g : {&entry.g1, &entry.g2}) {
      if (!p.groups.contains(*g)) {
        throw Error(ErrorCode::UnknownGroup,
                    "constraint " + entry.id + " references unknown group '" + *g + "'");
      }
    }
    FairnessConstraint c{entry.id, entry.g1, entry.g2, entry.metric, entry.epsilon};
    c.validate();
    p.constraints.push_back(std::move(c));
  }
  if (p.constraints.empty() && config.pairwise_epsilon) {
    p.constraints = pairwise_constraints(p.groups, config.metric, *config.pairwise_epsilon);
  }
  p.learner = make_learner(config);
  return p;
}

json cmd_audit(const RunConfig& config) {
  const auto start = Clock::now();
  const Pipeline p = prepare(config);
  const Dataset& data = *p.dataset;
  const ModelPtr model = p.learner->fit_unweighted(data, p.split.train, config.seed);
  const Predictions predictions = model->predict_all(data);

  std::vector<MetricSpec> metrics = {MetricKind::MR,  MetricKind::SP,  MetricKind::FPR,
                                     MetricKind::FNR, MetricKind::FOR, MetricKind::FDR};
  if (config.metric.kind == MetricKind::AEC) metrics.push_back(config.metric);

  json splits = json::object();
  for (const auto& [name, scope] :
       {std::pair{"validation", &p.split.validation}, std::pair{"test", &p.split.test}}) {
    const GroupAssignment local = p.groups.restricted_to(*scope);
    json metric_docs = json::object();
    for (const auto& metric : metrics) {
      double scale = 1.0;
      if (metric.kind == MetricKind::AEC) {
        scale = std::max(metric.aec_costs->first, metric.aec_costs->second);
      }
      json values = json::object();
      json gaps = json::array();
      for (const auto& [gid, members] : local.groups()) {
        try {
          values[gid] = number(fairness_value(metric, members, data, predictions));
        } catch (const Error& e) {
          values[gid] = nullptr;
        }
      }
      const auto ids = local.ids();
      for (std::size_t a = 0; a < ids.size(); ++a) {
        for (std::size_t b = a + 1; b < ids.size(); ++b) {
          const IndexSet& g1 = local.at(ids[a]);
          const IndexSet& g2 = local.at(ids[b]);
          json gap = {{"g1", ids[a]}, {"g2", ids[b]}};
          const std::size_t d1 = denominator(metric.kind, g1, data, predictions);
          const std::size_t d2 = denominator(metric.kind, g2, data, predictions);
          if (values[ids[a]].is_null() || values[ids[b]].is_null() || d1 == 0 || d2 == 0) {
            gap["gap"] = nullptr;
            gap["noise_bound"] = nullptr;
          } else {
            gap["gap"] = values[ids[a]].get<double>() - values[ids[b]].get<double>();
            // Three standard errors of a difference of two proportions at p = 1/2.
            gap["noise_bound"] = 3.0 * scale * std::sqrt(0.25 / d1 + 0.25 / d2);
          }
          gaps.push_back(gap);
        }
      }
      metric_docs[metric.name()] = {{"values", values}, {"gaps", gaps}};
    }
    json sizes = json::object();
    for (const auto& [gid, members] : local.groups()) sizes[gid] = members.size();
    splits[name] = {{"ap", accuracy(data, *scope, predictions)},
                    {"group_sizes", sizes},
                    {"metrics", metric_docs}};
  }

  json report = {{"command", "audit"},
                 {"config", config_summary(p)},
                 {"baseline", splits},
                 {"seconds", seconds_since(start)}};
  write_json(config.output_dir / "report.json", report);
  return report;
}

json cmd_train(const RunConfig& config) {
  const auto start = Clock::now();
  const Pipeline p = prepare(config);
  require_constraints(p);
  const Dataset& data = *p.dataset;

  const ModelPtr baseline = p.learner->fit_unweighted(data, p.split.train, config.seed);
  const Predictions base_pred = baseline->predict_all(data);
  json baseline_doc = {
      {"validation", score(data, p.groups, p.constraints, p.split.validation, base_pred)},
      {"test", score(data, p.groups, p.constraints, p.split.test, base_pred)}};

  ModelPtr model;
  LambdaVector lambdas;
  bool satisfied = false;
  std::optional<std::size_t> fits;
  std::size_t clamps = 0;
  std::size_t iterations = 0;
  std::string note;
  json probes = json::array();
  json diagnostics = json::array();
  std::string method;

  if (p.constraints.size() == 1) {
    method = "single";
    const FairnessConstraint& c = p.constraints.front();
    try {
      const TuneResult r = tune_single(data, p.split, p.groups, c, *p.learner, config.tuner);
      model = r.model;
      lambdas[c.id] = r.lambda;
      satisfied = r.satisfied;
      fits = r.fits;
      clamps = r.clamp_warnings;
      iterations = 1;
      for (const auto& probe : r.probes) {
        probes.push_back({{"lambda", probe.lambda}, {"ap", probe.ap}, {"fp", {{c.id, probe.fp}}}});
      }
      if (r.swapped) note = "group order swapped during tuning";
      // Learners only approximate the exact argmax, so the probe sequence may
      // not be monotone in lambda. Report it rather than assume it.
      const double sign = r.swapped ? -1.0 : 1.0;
      auto ordered = r.probes;
      std::sort(ordered.begin(), ordered.end(), [sign](const auto& a, const auto& b) {
        return sign * a.lambda < sign * b.lambda;
      });
      for (std::size_t i = 1; i < ordered.size(); ++i) {
        const auto& lo = ordered[i - 1];
        const auto& hi = ordered[i];
        if (sign * hi.fp < sign * lo.fp || hi.ap > lo.ap) {
          diagnostics.push_back("non-monotone probes between lambda " + format_number(lo.lambda) +
                                " and " + format_number(hi.lambda));
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleWithinCap) throw;
      model = baseline;
      lambdas[c.id] = 0.0;
      satisfied = false;
      note = e.what();
    }
  } else {
    method = "hill_climb";
    const MultiTuneResult r =
        hill_climb(data, p.split, p.groups, p.constraints, *p.learner, config.tuner);
    model = r.model;
    lambdas = r.lambdas;
    satisfied = r.satisfied;
    fits = r.fits_performed;
    clamps = r.clamp_warnings;
    iterations = r.iterations;
    note = r.note;
  }

  if (!diagnostics.empty()) {
    std::cerr << "warning: " << diagnostics.size()
              << " non-monotone probe pairs; see diagnostics in report.json\n";
  }

  const Predictions predictions = model->predict_all(data);
  json tuned = {{"method", method},
                {"lambdas", lambdas_json(lambdas, p.constraints)},
                {"satisfied", satisfied},
                {"iterations", iterations},
                {"validation", score(data, p.groups, p.constraints, p.split.validation, predictions)},
                {"test", score(data, p.groups, p.constraints, p.split.test, predictions)}};
  if (!note.empty()) tuned["note"] = note;

  write_model(config.output_dir / "model.json", *model, p);
  write_split(config.output_dir / "split.json", p);
  json report = {{"command", "train"},
                 {"config", config_summary(p)},
                 {"baseline", baseline_doc},
                 {"result", tuned},
                 {"probes", probes},
                 {"diagnostics", diagnostics},
                 {"clamp_warnings", clamps},
                 {"fits", fits ? json(*fits) : json(nullptr)},
                 {"model_file", "model.json"},
                 {"split_file", "split.json"},
                 {"seconds", seconds_since(start)}};
  write_json(config.output_dir / "report.json", report);
  return report;
}

std::string cmd_sweep(const RunConfig& config, const std::vector<double>& epsilons) {
  const Pipeline p = prepare(config);
  require_constraints(p);
  if (p.constraints.size() != 1) {
    throw Error(ErrorCode::ConfigError, "sweep needs exactly one constraint, have " +
                                            std::to_string(p.constraints.size()));
  }
  if (epsilons.empty()) throw Error(ErrorCode::ConfigError, "sweep needs at least one epsilon");

  std::vector<SweepRow> rows(epsilons.size());
  const std::size_t jobs = std::max<std::size_t>(1, config.sweep_jobs);
  for (std::size_t begin = 0; begin < epsilons.size(); begin += jobs) {
    const std::size_t end = std::min(epsilons.size(), begin + jobs);
    if (jobs == 1) {
      rows[begin] = sweep_row(p, epsilons[begin]);
      continue;
    }
    std::vector<std::future<SweepRow>> pending;
    for (std::size_t i = begin; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, sweep_row, std::cref(p), epsilons[i]));
    }
    for (std::size_t i = begin; i < end; ++i) rows[i] = pending[i - begin].get();
  }

  std::ostringstream csv;
  csv << kTradeoffHeader << "\n";
  json row_docs = json::array();
  json diagnostics = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    char seconds[32];
    std::snprintf(seconds, sizeof(seconds), "%.6f", r.seconds);
    csv << format_number(r.epsilon) << ',' << format_number(r.lambda) << ','
        << format_number(r.validation_ap) << ',' << format_number(r.validation_fp) << ','
        << format_number(r.test_ap) << ',' << format_number(r.test_fp) << ','
        << (r.fits ? std::to_string(*r.fits) : "nan") << ',' << seconds << "\n";
    json doc = {{"epsilon", r.epsilon},       {"lambda", number(r.lambda)},
                {"satisfied", r.satisfied},   {"validation_ap", number(r.validation_ap)},
                {"test_ap", number(r.test_ap)}, {"fits", r.fits ? json(*r.fits) : json(nullptr)}};
    if (!r.error.empty()) doc["error"] = r.error;
    row_docs.push_back(doc);
    if (i > 0 && epsilons[i] < epsilons[i - 1] && std::isfinite(r.test_ap) &&
        std::isfinite(rows[i - 1].test_ap) && r.test_ap > rows[i - 1].test_ap) {
      const std::string message = "test_ap rose from " + format_number(rows[i - 1].test_ap) +
                                  " to " + format_number(r.test_ap) + " as epsilon fell to " +
                                  format_number(r.epsilon);
      std::cerr << "warning: " << message << "\n";
      diagnostics.push_back(message);
    }
  }

  const std::string text = csv.str();
  write_text(config.output_dir / "tradeoff.csv", text);
  write_json(config.output_dir / "sweep_report.json",
             {{"command", "sweep"},
              {"config", config_summary(p)},
              {"rows", row_docs},
              {"diagnostics", diagnostics}});
  return text;
}

json cmd_compare_grid(const RunConfig& config) {
  const Pipeline p = prepare(config);
  require_constraints(p);
  const Dataset& data = *p.dataset;

  auto start = Clock::now();
  const MultiTuneResult hc =
      hill_climb(data, p.split, p.groups, p.constraints, *p.learner, config.tuner);
  const double hc_seconds = seconds_since(start);

  start = Clock::now();
  const GridSearchResult grid = grid_search(data, p.split, p.groups, p.constraints, *p.learner,
                                            config.grid_step, config.grid_max, config.tuner);
  const double grid_seconds = seconds_since(start);

  const auto summary = [&](const MultiTuneResult& r, double seconds) {
    const Predictions predictions = r.model->predict_all(data);
    json doc = {{"lambdas", lambdas_json(r.lambdas, p.constraints)},
                {"satisfied", r.satisfied},
                {"iterations", r.iterations},
                {"fits", r.fits_performed},
                {"clamp_warnings", r.clamp_warnings},
                {"validation",
                 score(data, p.groups, p.constraints, p.split.validation, predictions)},
                {"test", score(data, p.groups, p.constraints, p.split.test, predictions)},
                {"seconds", seconds}};
    if (!r.note.empty()) doc["note"] = r.note;
    return doc;
  };

  json report = {{"command", "compare-grid"},
                 {"config", config_summary(p)},
                 {"grid", {{"step", config.grid_step}, {"max", config.grid_max}}},
                 {"hill_climb", summary(hc, hc_seconds)},
                 {"grid_search", summary(grid.best, grid_seconds)},
                 {"fit_ratio", hc.fits_performed == 0
                                   ? json(nullptr)
                                   : json(static_cast<double>(grid.best.fits_performed) /
                                          static_cast<double>(hc.fits_performed))}};
  if (p.constraints.size() == 2) {
    grid.lattice.write_csv(config.output_dir / "region.csv");
    report["region_file"] = "region.csv";
  }
  write_json(config.output_dir / "report.json", report);
  return report;
}

void cmd_gen_synth(const SynthOptions& options, const std::filesystem::path& out) {
  const SynthSpec spec =
      planted_bias_spec(options.sp_gap, options.n, options.seed, options.noise_a, options.noise_b);
  const Dataset data = generate_synthetic(spec);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  write_csv(data, out);
}

ModelPtr load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open model " + path.string());
  json document;
  try {
    in >> document;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoError, "malformed model document " + path.string() + ": " + e.what());
  }
  if (!document.contains("model")) {
    throw Error(ErrorCode::IoError, "model document " + path.string() + " has no model entry");
  }
  return model_from_json(document.at("model"));
}

}  // namespace fairweight::cli
