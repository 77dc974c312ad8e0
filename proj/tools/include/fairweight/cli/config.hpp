#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairweight/data.hpp"
#include "fairweight/grouping.hpp"
#include "fairweight/learners.hpp"
#include "fairweight/metrics.hpp"
#include "fairweight/tuning.hpp"

namespace fairweight::cli {

/// One `constraint.<id>.*` block. Metric falls back to the `metric.*` keys.
struct ConstraintEntry {
  std::string id;
  MetricSpec metric;
  std::string g1;
  std::string g2;
  double epsilon = 0.0;
};

/// Everything a command needs, read from a flat `key = value` document.
///
///   data.path, data.label, data.positive_label, data.features
///   split.train, split.validation, split.test
///   grouping.kind (by_attribute | by_attribute_intersection), grouping.attributes
///   metric.kind, metric.c_fp, metric.c_fn
///   constraint.<id>.g1, .g2, .epsilon, .metric, .c_fp, .c_fn
///   fairness.epsilon       pairwise constraints over all groups when no
///                          constraint.<id> block is given
///   learner.kind (logreg | tree), learner.learning_rate, learner.epochs,
///   learner.l2, learner.tolerance, learner.max_depth, learner.min_leaf_weight
///   tuner.tau, tuner.delta, tuner.lambda_cap, tuner.max_linear_steps,
///   tuner.warm_start
///   grid.step, grid.max
///   sweep.epsilons, sweep.jobs
///   output.dir
///   seed
///
/// Lists are comma separated. `#` starts a comment. Relative paths resolve
/// against the config file's directory.
struct RunConfig {
  std::filesystem::path data_path;
  CsvOptions csv{"y", "1", std::nullopt};
  SplitSpec split;
  GroupingSpec grouping;
  MetricSpec metric;
  std::optional<double> pairwise_epsilon;
  std::vector<ConstraintEntry> constraints;
  std::string learner_kind = "logreg";
  LogRegConfig logreg;
  TreeConfig tree;
  TunerConfig tuner;
  double grid_step = 0.01;
  double grid_max = 1.0;
  std::vector<double> sweep_epsilons;
  std::size_t sweep_jobs = 1;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;

  /// Applies the seed to the split and tuner.
  void set_seed(std::uint64_t value);
  void validate() const;
};

/// Errors: ConfigError for syntax, unknown or duplicate keys and bad values.
RunConfig parse_config(const std::string& text,
                       const std::filesystem::path& base_dir = std::filesystem::path());
/// Errors: NotFound, plus those of parse_config.
RunConfig load_config(const std::filesystem::path& path);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace fairweight::cli
