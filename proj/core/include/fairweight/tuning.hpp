#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fairweight/data.hpp"
#include "fairweight/grouping.hpp"
#include "fairweight/metrics.hpp"
#include "fairweight/model.hpp"
#include "fairweight/weighting.hpp"

namespace fairweight {

struct TunerConfig {
  /// Binary search stops once the bracket is narrower than this.
  double tau = 1e-4;
  /// Linear-search step for model-parameterized metrics.
  double delta = 1e-3;
  /// Largest upper bound exponential search may try.
  double lambda_cap = 1048576.0;
  /// Linear search gives up after this many steps.
  std::size_t max_linear_steps = 100000;
  std::uint64_t seed = 0;
  /// Start each fit from the previous probe's model when the learner allows it.
  bool warm_start = true;

  void validate() const;
};

/// One trained probe. `lambda` is signed in the constraint's original group
/// order; `fp` is the validation gap in that same order.
struct TradeoffPoint {
  double lambda = 0.0;
  double ap = 0.0;
  double fp = 0.0;
};

struct TuneResult {
  ModelPtr model;
  /// Signed: negative when the tuner swapped the group order.
  double lambda = 0.0;
  double validation_ap = 0.0;
  double validation_fp = 0.0;
  bool satisfied = false;
  bool swapped = false;
  std::vector<TradeoffPoint> probes;
  /// Probes whose weights needed clamping at 0.
  std::size_t clamp_warnings = 0;
  std::size_t fits = 0;
};

/// A model trained at some Lambda and scored on the validation split.
struct Evaluation {
  LambdaVector lambdas;
  ModelPtr model;
  double ap = 0.0;
  /// Validation gap per constraint, in constraint order.
  std::vector<double> fp;
  std::size_t clamped = 0;
};

/// Train-on-train, score-on-validation harness shared by the tuners.
class TuningProblem {
 public:
  TuningProblem(const Dataset& dataset, const DataSplit& split, const GroupAssignment& groups,
                std::vector<FairnessConstraint> constraints, const WeightedLearner& learner,
                TunerConfig config);

  /// Fits at `lambdas`. Model-parameterized coefficients read their
  /// denominators from `weight_source` predictions on the train split.
  Evaluation fit(const LambdaVector& lambdas, const TrainedModel* weight_source);
  /// Same, but never warm-started, so the result depends on `lambdas` alone.
  Evaluation fit_cold(const LambdaVector& lambdas, const TrainedModel* weight_source);

  bool violated(const Evaluation& e, std::size_t index) const;
  bool any_violated(const Evaluation& e) const;
  bool any_parameterized() const noexcept { return any_parameterized_; }

  const std::vector<FairnessConstraint>& constraints() const noexcept { return constraints_; }
  const TunerConfig& config() const noexcept { return config_; }
  const Dataset& dataset() const noexcept { return dataset_; }
  const DataSplit& split() const noexcept { return split_; }
  const GroupAssignment& groups() const noexcept { return groups_; }

  std::size_t fits() const noexcept { return fits_; }
  std::size_t clamp_warnings() const noexcept { return clamp_warnings_; }
  const std::vector<Evaluation>& log() const noexcept { return log_; }

 private:
  Evaluation run(const LambdaVector& lambdas, const TrainedModel* weight_source, bool warm);

  const Dataset& dataset_;
  const DataSplit& split_;
  const GroupAssignment& groups_;
  std::vector<FairnessConstraint> constraints_;
  const WeightedLearner& learner_;
  TunerConfig config_;
  GroupAssignment train_groups_;
  GroupAssignment validation_groups_;
  bool any_parameterized_ = false;
  ModelPtr last_model_;
  std::size_t fits_ = 0;
  std::size_t clamp_warnings_ = 0;
  std::vector<Evaluation> log_;
};

/// A single-dimension probe seen from the working group order, where the
/// search always moves lambda upward from 0.
struct Probe {
  double lambda = 0.0;
  ModelPtr model;
  double ap = 0.0;
  double fp = 0.0;
};

/// Trains at `lambda` and reports the working-order gap. `weight_source` is
/// the model whose predictions model-parameterized weights use, or null.
using ProbeFn = std::function<Probe(double lambda, const TrainedModel* weight_source)>;

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  /// fp(lower) < -epsilon and fp(upper) >= -epsilon.
  Probe lower_probe;
  Probe upper_probe;
};

/// Doubles the upper bound from 1 until fp >= -epsilon. `start` is the
/// lambda = 0 probe. Errors: InfeasibleWithinCap.
Bracket exponential_search(const ProbeFn& probe, const Probe& start, double epsilon,
                           const TunerConfig& config);

/// Steps lambda by delta from 0, each step's weights computed from the
/// previous step's model. Errors: InfeasibleWithinCap.
Bracket linear_search(const ProbeFn& probe, const Probe& start, double epsilon,
                      const TunerConfig& config);

/// Bisects until the bracket is narrower than tau and returns the probe at
/// the final upper bound. Model-parameterized searches weight each midpoint
/// with the current lower-bound model.
Probe binary_search(const ProbeFn& probe, Bracket bracket, double epsilon,
                    bool model_parameterized, const TunerConfig& config);

struct DimensionResult {
  Evaluation evaluation;
  /// Signed, in the constraint's original group order.
  double lambda = 0.0;
  bool satisfied = false;
  bool swapped = false;
};

/// Tunes Lambda[index] with every other entry frozen at `lambdas`. `current`,
/// when given, must be the evaluation at `lambdas` and is reused as the
/// starting point if Lambda[index] is already 0; its model also feeds frozen
/// model-parameterized entries.
DimensionResult tune_dimension(TuningProblem& problem, const LambdaVector& lambdas,
                               std::size_t index, const Evaluation* current = nullptr);

/// Single-constraint tuning: unconstrained fit, early exit when already fair,
/// group-order normalization, bracket search, then bisection. All scoring
/// uses the validation split. Errors: InfeasibleWithinCap, learner and
/// metric errors.
TuneResult tune_single(const Dataset& dataset, const DataSplit& split,
                       const GroupAssignment& groups, const FairnessConstraint& constraint,
                       const WeightedLearner& learner, const TunerConfig& config);

/// Spec-shaped wrappers around the bracket searches for one constraint. They
/// fit the unconstrained model, normalize group order, then search.
Bracket exponential_search(const Dataset& dataset, const DataSplit& split,
                           const GroupAssignment& groups, const FairnessConstraint& constraint,
                           const WeightedLearner& learner, const TunerConfig& config);
Bracket linear_search(const Dataset& dataset, const DataSplit& split,
                      const GroupAssignment& groups, const FairnessConstraint& constraint,
                      const WeightedLearner& learner, const TunerConfig& config);

}  // namespace fairweight
