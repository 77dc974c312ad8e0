#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairweight/data.hpp"
#include "fairweight/model.hpp"

namespace fairweight {

struct LogRegConfig {
  double learning_rate = 0.1;
  int epochs = 500;
  double l2 = 0.0;
  /// Descent stops early once every gradient component is below this.
  double tolerance = 1e-4;

  void validate() const;
};

struct TreeConfig {
  int max_depth = 4;
  double min_leaf_weight = 1.0;

  void validate() const;
};

/// Logistic model stored in standardized feature space together with the
/// standardization constants.
class LogisticModel final : public TrainedModel {
 public:
  LogisticModel(std::vector<double> coefficients, double intercept, std::vector<double> mean,
                std::vector<double> scale, int epochs_run = 0);

  int predict(std::span<const double> features) const override;
  std::string kind() const override { return "logreg"; }
  nlohmann::json to_json() const override;

  /// Probability of the positive class.
  double probability(std::span<const double> features) const;

  /// Coefficients and intercept mapped back to raw feature units.
  std::vector<double> raw_coefficients() const;
  double raw_intercept() const;

  const std::vector<double>& coefficients() const noexcept { return coefficients_; }
  double intercept() const noexcept { return intercept_; }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& scale() const noexcept { return scale_; }
  /// Descent steps taken by the fit that produced this model.
  int epochs_run() const noexcept { return epochs_run_; }

 private:
  std::vector<double> coefficients_;
  double intercept_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  int epochs_run_;
};

/// Weighted logistic loss over the positive-weight train examples, in
/// standardized space:
///
///   L(b, beta) = (1/W) sum_i w_i logloss(y_i, b + beta . z_i) + (l2/2) |beta|^2
///
/// Parameter layout is [b, beta_1, ..., beta_d].
class WeightedLogLoss {
 public:
  WeightedLogLoss(const Dataset& dataset, std::span<const std::size_t> train,
                  std::span<const double> weights, double l2);

  double value(std::span<const double> params) const;
  /// Returns the loss and writes the gradient into `gradient`.
  double value_and_gradient(std::span<const double> params, std::span<double> gradient) const;

  std::size_t dimension() const noexcept { return dims_ + 1; }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& scale() const noexcept { return scale_; }

 private:
  std::size_t dims_;
  double l2_;
  double total_weight_ = 0.0;
  std::vector<double> mean_;
  std::vector<double> scale_;
  // Row-major standardized features of the kept examples.
  std::vector<double> z_;
  std::vector<double> y_;
  std::vector<double> w_;
};

/// Full-batch gradient descent on WeightedLogLoss. With `warm_start` (a
/// LogisticModel over the same features) descent starts from its parameters.
/// Errors: EmptyTrainingSet, SingleClassTrainingSet, NonFiniteLoss.
std::shared_ptr<const LogisticModel> fit_logreg(const Dataset& dataset,
                                                std::span<const std::size_t> train,
                                                std::span<const double> weights,
                                                const LogRegConfig& config, std::uint64_t seed,
                                                const TrainedModel* warm_start = nullptr);

class TreeModel final : public TrainedModel {
 public:
  struct Node {
    // Internal nodes route x[feature] <= threshold to `left`.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int prediction = 0;

    bool is_leaf() const noexcept { return feature < 0; }
  };

  explicit TreeModel(std::vector<Node> nodes);

  int predict(std::span<const double> features) const override;
  std::string kind() const override { return "tree"; }
  nlohmann::json to_json() const override;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int depth() const;

 private:
  std::vector<Node> nodes_;
};

/// CART-style tree: axis-aligned splits at midpoints of consecutive distinct
/// values, chosen by largest weighted Gini decrease; leaves take the
/// weighted-majority label (ties predict 1). Zero-weight examples are dropped.
/// Errors: EmptyTrainingSet.
std::shared_ptr<const TreeModel> fit_tree(const Dataset& dataset, std::span<const std::size_t> train,
                                          std::span<const double> weights, const TreeConfig& config,
                                          std::uint64_t seed);

class LogisticRegression final : public WeightedLearner {
 public:
  explicit LogisticRegression(LogRegConfig config = {}) : config_(config) { config_.validate(); }

  ModelPtr fit(const Dataset& dataset, std::span<const std::size_t> train,
               std::span<const double> weights, std::uint64_t seed,
               const TrainedModel* warm_start) const override;
  std::string kind() const override { return "logreg"; }
  bool supports_warm_start() const override { return true; }

  const LogRegConfig& config() const noexcept { return config_; }

 private:
  LogRegConfig config_;
};

class DecisionTree final : public WeightedLearner {
 public:
  explicit DecisionTree(TreeConfig config = {}) : config_(config) { config_.validate(); }

  ModelPtr fit(const Dataset& dataset, std::span<const std::size_t> train,
               std::span<const double> weights, std::uint64_t seed,
               const TrainedModel* warm_start) const override;
  std::string kind() const override { return "tree"; }

  const TreeConfig& config() const noexcept { return config_; }

 private:
  TreeConfig config_;
};

/// Rebuilds a built-in model from its to_json() document.
ModelPtr model_from_json(const nlohmann::json& document);

}  // namespace fairweight
