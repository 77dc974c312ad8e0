#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fairweight/data.hpp"
#include "fairweight/grouping.hpp"
#include "fairweight/metrics.hpp"
#include "fairweight/model.hpp"

namespace fairweight {

/// Signed trade-off multiplier per constraint id. Missing entries are 0.
using LambdaVector = std::map<std::string, double>;

struct WeightVector {
  std::vector<double> values;
  /// Number of weights that came out negative and were raised to 0.
  std::size_t clamped = 0;

  bool clamp_occurred() const noexcept { return clamped != 0; }
};

/// Per-example weights turning max AP + lambda * FP into a weighted accuracy
/// problem:
///
///   w_i = 1 + N * lambda * (c_i^{g1} [i in g1] - c_i^{g2} [i in g2])
///
/// with N = dataset.size(). Examples in neither group keep weight 1. With
/// `clamp`, negative weights become 0 and are counted.
WeightVector derive_weights(double lambda, const FairnessConstraint& constraint,
                            const Dataset& dataset, const GroupAssignment& groups,
                            const TrainedModel* model = nullptr, bool clamp = true);

/// Sum of the single-constraint deviations from 1, one per Lambda entry.
WeightVector derive_weights_multi(const LambdaVector& lambdas,
                                  std::span<const FairnessConstraint> constraints,
                                  const Dataset& dataset, const GroupAssignment& groups,
                                  const TrainedModel* model = nullptr, bool clamp = true);

/// Core form used by the tuners. `groups` is usually restricted to the train
/// split and `population` is then the train size; `predictions` is indexed by
/// dataset index and may be empty when no metric needs it. Constraints whose
/// lambda is 0 are skipped entirely.
WeightVector derive_weights_multi(const LambdaVector& lambdas,
                                  std::span<const FairnessConstraint> constraints,
                                  const Dataset& dataset, const GroupAssignment& groups,
                                  std::span<const int> predictions, std::size_t population,
                                  bool clamp);

}  // namespace fairweight
