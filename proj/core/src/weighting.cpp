#include "fairweight/weighting.hpp"

#include <cmath>

#include "fairweight/error.hpp"

namespace fairweight {

WeightVector derive_weights_multi(const LambdaVector& lambdas,
                                  std::span<const FairnessConstraint> constraints,
                                  const Dataset& dataset, const GroupAssignment& groups,
                                  std::span<const int> predictions, std::size_t population,
                                  bool clamp) {
  std::vector<double> delta(dataset.size(), 0.0);
  const double n = static_cast<double>(population);
  for (const FairnessConstraint& constraint : constraints) {
    auto it = lambdas.find(constraint.id);
    if (it == lambdas.end() || it->second == 0.0) continue;
    const double lambda = it->second;
    if (!std::isfinite(lambda)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite lambda for '" + constraint.id + "'");
    }
    const CoefficientSet first =
        coefficients(constraint.metric, groups.at(constraint.g1), dataset, predictions);
    const CoefficientSet second =
        coefficients(constraint.metric, groups.at(constraint.g2), dataset, predictions);
    for (std::size_t k = 0; k < first.indices.size(); ++k) {
      delta[first.indices[k]] += n * lambda * first.c[k];
    }
    for (std::size_t k = 0; k < second.indices.size(); ++k) {
      delta[second.indices[k]] -= n * lambda * second.c[k];
    }
  }

  WeightVector out;
  out.values.resize(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    double w = 1.0 + delta[i];
    if (clamp && w < 0.0) {
      w = 0.0;
      ++out.clamped;
    }
    out.values[i] = w;
  }
  return out;
}

WeightVector derive_weights_multi(const LambdaVector& lambdas,
                                  std::span<const FairnessConstraint> constraints,
                                  const Dataset& dataset, const GroupAssignment& groups,
                                  const TrainedModel* model, bool clamp) {
  Predictions predictions;
  for (const FairnessConstraint& c : constraints) {
    if (model != nullptr && c.metric.parameterized_by_model()) {
      predictions = model->predict_all(dataset);
      break;
    }
  }
  return derive_weights_multi(lambdas, constraints, dataset, groups, predictions, dataset.size(),
                              clamp);
}

WeightVector derive_weights(double lambda, const FairnessConstraint& constraint,
                            const Dataset& dataset, const GroupAssignment& groups,
                            const TrainedModel* model, bool clamp) {
  const LambdaVector lambdas{{constraint.id, lambda}};
  return derive_weights_multi(lambdas, std::span<const FairnessConstraint>(&constraint, 1), dataset,
                              groups, model, clamp);
}

}  // namespace fairweight
