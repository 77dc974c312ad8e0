#include <algorithm>
#include <cmath>

#include "fairweight/error.hpp"
#include "fairweight/learners.hpp"

namespace fairweight {
namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_weights(const Dataset& dataset, std::span<const std::size_t> train,
                   std::span<const double> weights) {
  if (weights.size() != dataset.size()) {
    throw Error(ErrorCode::InvalidArgument, "weight vector length does not match dataset");
  }
  if (train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "empty training set");
  for (std::size_t i : train) {
    if (i >= dataset.size()) throw Error(ErrorCode::InvalidArgument, "train index out of range");
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "weight of example " + std::to_string(i) + " is negative or non-finite");
    }
  }
}

}  // namespace

void LogRegConfig::validate() const {
  if (!(learning_rate > 0.0) || epochs <= 0 || !(l2 >= 0.0) || !(tolerance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid logistic regression config");
  }
}

LogisticModel::LogisticModel(std::vector<double> coefficients, double intercept,
                             std::vector<double> mean, std::vector<double> scale, int epochs_run)
    : coefficients_(std::move(coefficients)),
      intercept_(intercept),
      mean_(std::move(mean)),
      scale_(std::move(scale)),
      epochs_run_(epochs_run) {
  if (coefficients_.size() != mean_.size() || mean_.size() != scale_.size()) {
    throw Error(ErrorCode::InvalidArgument, "logistic model parameter sizes disagree");
  }
}

double LogisticModel::probability(std::span<const double> features) const {
  double z = intercept_;
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    z += coefficients_[j] * (features[j] - mean_[j]) / scale_[j];
  }
  return sigmoid(z);
}

int LogisticModel::predict(std::span<const double> features) const {
  if (features.size() != coefficients_.size()) {
    throw Error(ErrorCode::InvalidArgument, "feature count does not match model");
  }
  double z = intercept_;
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    z += coefficients_[j] * (features[j] - mean_[j]) / scale_[j];
  }
  // sigmoid(z) >= 0.5 exactly when z >= 0.
  return z >= 0.0 ? 1 : 0;
}

std::vector<double> LogisticModel::raw_coefficients() const {
  std::vector<double> out(coefficients_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = coefficients_[j] / scale_[j];
  return out;
}

double LogisticModel::raw_intercept() const {
  double b = intercept_;
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    b -= coefficients_[j] * mean_[j] / scale_[j];
  }
  return b;
}

nlohmann::json LogisticModel::to_json() const {
  return {{"kind", kind()},
          {"intercept", intercept_},
          {"coefficients", coefficients_},
          {"feature_mean", mean_},
          {"feature_scale", scale_},
          {"epochs_run", epochs_run_}};
}

WeightedLogLoss::WeightedLogLoss(const Dataset& dataset, std::span<const std::size_t> train,
                                 std::span<const double> weights, double l2)
    : dims_(dataset.feature_count()), l2_(l2), mean_(dims_, 0.0), scale_(dims_, 1.0) {
  check_weights(dataset, train, weights);
  for (std::size_t i : train) total_weight_ += weights[i];
  if (!(total_weight_ > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "all training weights are zero");
  }
  // Weighted moments, so integer weights standardize like replicated rows.
  for (std::size_t i : train) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const auto x = dataset.features(i);
    for (std::size_t j = 0; j < dims_; ++j) mean_[j] += w * x[j];
  }
  for (double& m : mean_) m /= total_weight_;
  std::vector<double> var(dims_, 0.0);
  for (std::size_t i : train) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const auto x = dataset.features(i);
    for (std::size_t j = 0; j < dims_; ++j) {
      const double d = x[j] - mean_[j];
      var[j] += w * d * d;
    }
  }
  for (std::size_t j = 0; j < dims_; ++j) {
    const double v = var[j] / total_weight_;
    scale_[j] = v > 1e-24 ? std::sqrt(v) : 1.0;
  }

  for (std::size_t i : train) {
    const double w = weights[i];
    if (w == 0.0) continue;
    const auto x = dataset.features(i);
    for (std::size_t j = 0; j < dims_; ++j) z_.push_back((x[j] - mean_[j]) / scale_[j]);
    y_.push_back(static_cast<double>(dataset.label(i)));
    w_.push_back(w / total_weight_);
  }
}

double WeightedLogLoss::value(std::span<const double> params) const {
  double loss = 0.0;
  for (std::size_t r = 0; r < y_.size(); ++r) {
    const double* row = z_.data() + r * dims_;
    double z = params[0];
    for (std::size_t j = 0; j < dims_; ++j) z += params[j + 1] * row[j];
    loss += w_[r] * (softplus(z) - y_[r] * z);
  }
  double penalty = 0.0;
  for (std::size_t j = 0; j < dims_; ++j) penalty += params[j + 1] * params[j + 1];
  return loss + 0.5 * l2_ * penalty;
}

double WeightedLogLoss::value_and_gradient(std::span<const double> params,
                                           std::span<double> gradient) const {
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double loss = 0.0;
  for (std::size_t r = 0; r < y_.size(); ++r) {
    const double* row = z_.data() + r * dims_;
    double z = params[0];
    for (std::size_t j = 0; j < dims_; ++j) z += params[j + 1] * row[j];
    loss += w_[r] * (softplus(z) - y_[r] * z);
    const double residual = w_[r] * (sigmoid(z) - y_[r]);
    gradient[0] += residual;
    for (std::size_t j = 0; j < dims_; ++j) gradient[j + 1] += residual * row[j];
  }
  double penalty = 0.0;
  for (std::size_t j = 0; j < dims_; ++j) {
    penalty += params[j + 1] * params[j + 1];
    gradient[j + 1] += l2_ * params[j + 1];
  }
  return loss + 0.5 * l2_ * penalty;
}

std::shared_ptr<const LogisticModel> fit_logreg(const Dataset& dataset,
                                                std::span<const std::size_t> train,
                                                std::span<const double> weights,
                                                const LogRegConfig& config, std::uint64_t /*seed*/,
                                                const TrainedModel* warm_start) {
  config.validate();
  check_weights(dataset, train, weights);
  bool has_negative = false;
  bool has_positive = false;
  for (std::size_t i : train) (dataset.label(i) ? has_positive : has_negative) = true;
  if (!has_negative || !has_positive) {
    throw Error(ErrorCode::SingleClassTrainingSet, "training set holds a single class");
  }

  const WeightedLogLoss objective(dataset, train, weights, config.l2);
  const std::size_t d = dataset.feature_count();
  std::vector<double> params(d + 1, 0.0);

  if (const auto* previous = dynamic_cast<const LogisticModel*>(warm_start);
      previous != nullptr && previous->coefficients().size() == d) {
    // Re-express the previous decision function in this fit's standardization.
    const std::vector<double> raw = previous->raw_coefficients();
    double b = previous->raw_intercept();
    for (std::size_t j = 0; j < d; ++j) {
      params[j + 1] = raw[j] * objective.scale()[j];
      b += raw[j] * objective.mean()[j];
    }
    params[0] = b;
  }

  std::vector<double> gradient(d + 1, 0.0);
  int epoch = 0;
  for (; epoch < config.epochs; ++epoch) {
    const double loss = objective.value_and_gradient(params, gradient);
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::NonFiniteLoss, "logistic loss became non-finite at epoch " +
                                                std::to_string(epoch));
    }
    double largest = 0.0;
    for (double g : gradient) largest = std::max(largest, std::abs(g));
    if (largest < config.tolerance) break;
    for (std::size_t k = 0; k <= d; ++k) params[k] -= config.learning_rate * gradient[k];
  }
  for (double p : params) {
    if (!std::isfinite(p)) throw Error(ErrorCode::NonFiniteLoss, "non-finite logistic parameters");
  }

  std::vector<double> coefficients(params.begin() + 1, params.end());
  return std::make_shared<const LogisticModel>(std::move(coefficients), params[0],
                                               objective.mean(), objective.scale(), epoch);
}

ModelPtr LogisticRegression::fit(const Dataset& dataset, std::span<const std::size_t> train,
                                 std::span<const double> weights, std::uint64_t seed,
                                 const TrainedModel* warm_start) const {
  return fit_logreg(dataset, train, weights, config_, seed, warm_start);
}

}  // namespace fairweight
