#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairweight/cli/config.hpp"
#include "fairweight/model.hpp"
#include "fairweight/synth.hpp"

namespace fairweight::cli {

/// Loaded data, split, groups and constraints for one run.
struct Pipeline {
  RunConfig config;
  std::shared_ptr<const Dataset> dataset;
  DataSplit split;
  GroupAssignment groups;
  std::vector<FairnessConstraint> constraints;
  std::unique_ptr<WeightedLearner> learner;
};

/// Errors: data, grouping and config errors. Constraint groups must exist.
Pipeline prepare(const RunConfig& config);

std::unique_ptr<WeightedLearner> make_learner(const RunConfig& config);

/// Unconstrained model, AP and every built-in metric's per-group values and
/// pairwise gaps on validation and test. Writes report.json.
nlohmann::json cmd_audit(const RunConfig& config);

/// tune_single for one constraint, hill_climb for several. Writes report.json,
/// model.json and split.json.
nlohmann::json cmd_train(const RunConfig& config);

/// One tuning run per epsilon for the single configured constraint. Writes
/// tradeoff.csv and sweep_report.json; returns the CSV text.
std::string cmd_sweep(const RunConfig& config, const std::vector<double>& epsilons);

/// hill_climb against grid_search for the configured constraints. Writes
/// report.json, and region.csv when there are exactly two constraints.
nlohmann::json cmd_compare_grid(const RunConfig& config);

/// Planted-bias CSV for acceptance runs and demos.
struct SynthOptions {
  std::size_t n = 2000;
  double sp_gap = 0.2;
  double noise_a = 0.5;
  double noise_b = 0.5;
  std::uint64_t seed = 0;
};
void cmd_gen_synth(const SynthOptions& options, const std::filesystem::path& out);

/// Column header of tradeoff.csv.
inline constexpr const char* kTradeoffHeader =
    "epsilon,lambda,validation_ap,validation_fp,test_ap,test_fp,fits,seconds";

/// Reads a model.json written by cmd_train.
ModelPtr load_model(const std::filesystem::path& path);

}  // namespace fairweight::cli
