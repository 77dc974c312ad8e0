#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairweight/data.hpp"

namespace fairweight {

/// Hard 0/1 predictions indexed by dataset index.
using Predictions = std::vector<int>;

/// A fitted binary classifier h_theta.
class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  virtual int predict(std::span<const double> features) const = 0;
  virtual std::string kind() const = 0;
  /// Self-describing document; model_from_json() reverses it for built-in kinds.
  virtual nlohmann::json to_json() const = 0;

  std::vector<int> predict_batch(const Dataset& dataset, std::span<const std::size_t> indices) const;
  /// Prediction for every example in the dataset.
  Predictions predict_all(const Dataset& dataset) const;
};

using ModelPtr = std::shared_ptr<const TrainedModel>;

/// A black-box training algorithm that accepts per-example weights.
///
/// Implementations must be deterministic for identical inputs and seed, must
/// ignore weights outside `train`, and must treat all-ones weights exactly like
/// unweighted training.
class WeightedLearner {
 public:
  virtual ~WeightedLearner() = default;

  /// `weights` has one entry per dataset example.
  virtual ModelPtr fit(const Dataset& dataset, std::span<const std::size_t> train,
                       std::span<const double> weights, std::uint64_t seed,
                       const TrainedModel* warm_start) const = 0;

  virtual std::string kind() const = 0;
  virtual bool supports_warm_start() const { return false; }

  /// Unit-weight convenience path.
  ModelPtr fit_unweighted(const Dataset& dataset, std::span<const std::size_t> train,
                          std::uint64_t seed) const;
};

}  // namespace fairweight
