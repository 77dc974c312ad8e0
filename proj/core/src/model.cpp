#include "fairweight/model.hpp"

namespace fairweight {

std::vector<int> TrainedModel::predict_batch(const Dataset& dataset,
                                             std::span<const std::size_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(predict(dataset.features(i)));
  return out;
}

Predictions TrainedModel::predict_all(const Dataset& dataset) const {
  Predictions out(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) out[i] = predict(dataset.features(i));
  return out;
}

ModelPtr WeightedLearner::fit_unweighted(const Dataset& dataset,
                                         std::span<const std::size_t> train,
                                         std::uint64_t seed) const {
  const std::vector<double> ones(dataset.size(), 1.0);
  return fit(dataset, train, ones, seed, nullptr);
}

}  // namespace fairweight
