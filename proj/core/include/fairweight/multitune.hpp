#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairweight/tuning.hpp"

namespace fairweight {

struct MultiTuneResult {
  ModelPtr model;
  LambdaVector lambdas;
  std::map<std::string, double> per_constraint_fp;
  double validation_ap = 0.0;
  /// Every constraint holds on validation.
  bool satisfied = false;
  std::size_t iterations = 0;
  std::size_t fits_performed = 0;
  std::size_t clamp_warnings = 0;
  /// Why the search stopped early, when it did.
  std::string note;
};

/// Greedy coordinate search over Lambda. Starting from Lambda = 0, each
/// iteration picks the constraint with the largest violation |FP_k| - eps_k
/// (ties to the lowest index) and re-tunes its entry with the others frozen.
/// Stops when everything holds or after 5k iterations; infeasibility is
/// reported through `satisfied`, never thrown.
MultiTuneResult hill_climb(const Dataset& dataset, const DataSplit& split,
                           const GroupAssignment& groups,
                           std::span<const FairnessConstraint> constraints,
                           const WeightedLearner& learner, const TunerConfig& config);

struct LatticePoint {
  std::vector<double> lambdas;
  std::vector<double> fp;
  double ap = 0.0;
};

struct RegionSample {
  std::vector<std::string> constraint_ids;
  std::vector<LatticePoint> points;

  /// Two-constraint export: lambda_1,lambda_2,fp_1,fp_2,ap.
  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
};

struct GridSearchResult {
  MultiTuneResult best;
  RegionSample lattice;
};

/// Trains at every point of {0, step, 2 step, ...}^k up to `grid_max` and keeps
/// the most accurate point that satisfies all constraints, or the most
/// accurate point overall when none does. Fits are cold-started so each point
/// depends on its Lambda alone.
GridSearchResult grid_search(const Dataset& dataset, const DataSplit& split,
                             const GroupAssignment& groups,
                             std::span<const FairnessConstraint> constraints,
                             const WeightedLearner& learner, double grid_step, double grid_max,
                             const TunerConfig& config = {});

/// Validation FP vector and AP over an explicit two-constraint grid, for
/// plotting satisfactory regions.
RegionSample sample_region(const Dataset& dataset, const DataSplit& split,
                           const GroupAssignment& groups,
                           std::span<const FairnessConstraint> constraints,
                           const WeightedLearner& learner, std::span<const double> lambda_1,
                           std::span<const double> lambda_2, const TunerConfig& config = {});

}  // namespace fairweight
