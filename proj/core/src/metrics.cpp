#include "fairweight/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fairweight/error.hpp"

namespace fairweight {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::MR: return "MR";
    case MetricKind::SP: return "SP";
    case MetricKind::FPR: return "FPR";
    case MetricKind::FNR: return "FNR";
    case MetricKind::FOR: return "FOR";
    case MetricKind::FDR: return "FDR";
    case MetricKind::AEC: return "AEC";
    case MetricKind::Custom: return "custom";
  }
  return "?";
}

MetricKind parse_metric_kind(const std::string& text) {
  std::string upper = text;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (MetricKind kind : {MetricKind::MR, MetricKind::SP, MetricKind::FPR, MetricKind::FNR,
                          MetricKind::FOR, MetricKind::FDR, MetricKind::AEC}) {
    if (upper == to_string(kind)) return kind;
  }
  if (upper == "CUSTOM") return MetricKind::Custom;
  throw Error(ErrorCode::ConfigError, "unknown metric '" + text + "'");
}

MetricRegistry& MetricRegistry::instance() {
  static MetricRegistry registry;
  return registry;
}

void MetricRegistry::add(const std::string& id, CustomMetric metric) {
  std::lock_guard lock(mutex_);
  metrics_[id] = std::move(metric);
}

CustomMetric MetricRegistry::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = metrics_.find(id);
  if (it == metrics_.end()) {
    throw Error(ErrorCode::NotFound, "no custom metric registered as '" + id + "'");
  }
  return it->second;
}

MetricSpec MetricSpec::aec(double c_fp, double c_fn) {
  MetricSpec spec(MetricKind::AEC);
  spec.aec_costs = std::make_pair(c_fp, c_fn);
  return spec;
}

MetricSpec MetricSpec::custom(std::string id) {
  MetricSpec spec(MetricKind::Custom);
  spec.custom_id = std::move(id);
  return spec;
}

bool MetricSpec::parameterized_by_model() const {
  switch (kind) {
    case MetricKind::FOR:
    case MetricKind::FDR:
      return true;
    case MetricKind::Custom:
      return MetricRegistry::instance().get(custom_id.value_or("")).parameterized_by_model;
    default:
      return false;
  }
}

void MetricSpec::validate() const {
  if (kind == MetricKind::AEC) {
    if (!aec_costs || !(aec_costs->first >= 0.0) || !(aec_costs->second >= 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "AEC needs nonnegative costs (c_fp, c_fn)");
    }
  }
  if (kind == MetricKind::Custom && !custom_id) {
    throw Error(ErrorCode::InvalidArgument, "custom metric needs a registry id");
  }
  if (kind == MetricKind::Custom) MetricRegistry::instance().get(*custom_id);
}

std::string MetricSpec::name() const {
  if (kind == MetricKind::Custom) return "custom:" + custom_id.value_or("");
  return to_string(kind);
}

namespace {

void check_predictions(const Dataset& dataset, std::span<const int> predictions) {
  if (!predictions.empty() && predictions.size() != dataset.size()) {
    throw Error(ErrorCode::InvalidArgument, "prediction vector length does not match dataset");
  }
}

// Coefficient that is `on_label` for members with y == label, else 0, scaled
// by 1/denominator.
CoefficientSet conditional(const IndexSet& group, const Dataset& dataset, int label,
                           double sign, std::size_t denominator, double c0,
                           const char* what) {
  if (denominator == 0) {
    throw Error(ErrorCode::EmptyDenominator, std::string("group has no ") + what);
  }
  CoefficientSet out;
  out.indices = group;
  out.c0 = c0;
  out.c.reserve(group.size());
  const double value = sign / static_cast<double>(denominator);
  for (std::size_t i : group) out.c.push_back(dataset.label(i) == label ? value : 0.0);
  return out;
}

}  // namespace

CoefficientSet coefficients(const MetricSpec& metric, const IndexSet& group,
                            const Dataset& dataset, std::span<const int> predictions) {
  metric.validate();
  check_predictions(dataset, predictions);
  if (group.empty()) throw Error(ErrorCode::EmptyIndexSet, "coefficients of an empty group");

  const bool needs_model = metric.parameterized_by_model();
  if (needs_model && predictions.empty()) {
    throw Error(ErrorCode::MissingModel, metric.name() + " coefficients need model predictions");
  }

  const double size = static_cast<double>(group.size());
  std::size_t negatives = 0;
  for (std::size_t i : group) negatives += dataset.label(i) == 0 ? 1 : 0;
  const std::size_t positives = group.size() - negatives;

  CoefficientSet out;
  switch (metric.kind) {
    case MetricKind::MR:
      out.indices = group;
      out.c.assign(group.size(), 1.0 / size);
      out.c0 = 0.0;
      return out;
    case MetricKind::SP:
      out.indices = group;
      out.c.reserve(group.size());
      for (std::size_t i : group) out.c.push_back(dataset.label(i) == 1 ? 1.0 / size : -1.0 / size);
      out.c0 = static_cast<double>(negatives) / size;
      return out;
    case MetricKind::FPR:
      return conditional(group, dataset, 0, 1.0, negatives, 0.0, "negative labels");
    case MetricKind::FNR:
      return conditional(group, dataset, 1, 1.0, positives, 0.0, "positive labels");
    case MetricKind::FOR: {
      std::size_t predicted_negative = 0;
      for (std::size_t i : group) predicted_negative += predictions[i] == 0 ? 1 : 0;
      return conditional(group, dataset, 0, -1.0, predicted_negative, 1.0,
                         "predicted negatives");
    }
    case MetricKind::FDR: {
      std::size_t predicted_positive = 0;
      for (std::size_t i : group) predicted_positive += predictions[i] == 1 ? 1 : 0;
      return conditional(group, dataset, 1, -1.0, predicted_positive, 1.0,
                         "predicted positives");
    }
    case MetricKind::AEC: {
      const auto [c_fp, c_fn] = *metric.aec_costs;
      out.indices = group;
      out.c.reserve(group.size());
      for (std::size_t i : group) out.c.push_back(dataset.label(i) == 0 ? -c_fp / size : -c_fn / size);
      out.c0 = (c_fp * static_cast<double>(negatives) + c_fn * static_cast<double>(positives)) / size;
      return out;
    }
    case MetricKind::Custom: {
      const CustomMetric custom = MetricRegistry::instance().get(*metric.custom_id);
      out = custom.coefficients(dataset, group,
                                custom.parameterized_by_model ? predictions : std::span<const int>{});
      if (out.indices != group || out.c.size() != group.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "custom metric '" + *metric.custom_id + "' returned coefficients for a different index set");
      }
      return out;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled metric kind");
}

CoefficientSet coefficients(const MetricSpec& metric, const IndexSet& group,
                            const Dataset& dataset, const TrainedModel* model) {
  if (model == nullptr) return coefficients(metric, group, dataset, std::span<const int>{});
  const Predictions predictions = model->predict_all(dataset);
  return coefficients(metric, group, dataset, predictions);
}

double fairness_value(const MetricSpec& metric, const IndexSet& group, const Dataset& dataset,
                      std::span<const int> predictions) {
  if (predictions.size() != dataset.size()) {
    throw Error(ErrorCode::InvalidArgument, "fairness_value needs one prediction per example");
  }
  const CoefficientSet coeffs = coefficients(metric, group, dataset, predictions);
  double value = coeffs.c0;
  for (std::size_t k = 0; k < coeffs.indices.size(); ++k) {
    const std::size_t i = coeffs.indices[k];
    if (predictions[i] == dataset.label(i)) value += coeffs.c[k];
  }
  return value;
}

double fairness_value(const MetricSpec& metric, const IndexSet& group, const Dataset& dataset,
                      const TrainedModel& model) {
  const Predictions predictions = model.predict_all(dataset);
  return fairness_value(metric, group, dataset, predictions);
}

FairnessConstraint FairnessConstraint::swapped() const {
  FairnessConstraint out = *this;
  std::swap(out.g1, out.g2);
  return out;
}

void FairnessConstraint::validate() const {
  if (g1 == g2) {
    throw Error(ErrorCode::InvalidArgument, "constraint '" + id + "' names the same group twice");
  }
  if (!(epsilon >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "constraint '" + id + "' has negative epsilon");
  }
  metric.validate();
}

std::vector<FairnessConstraint> pairwise_constraints(const GroupAssignment& groups,
                                                     const MetricSpec& metric, double epsilon) {
  const std::vector<std::string> ids = groups.ids();
  std::vector<FairnessConstraint> out;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      out.push_back({ids[a] + "~" + ids[b], ids[a], ids[b], metric, epsilon});
    }
  }
  return out;
}

double fairness_gap(const FairnessConstraint& constraint, const Dataset& dataset,
                    const GroupAssignment& groups, std::span<const int> predictions) {
  return fairness_value(constraint.metric, groups.at(constraint.g1), dataset, predictions) -
         fairness_value(constraint.metric, groups.at(constraint.g2), dataset, predictions);
}

double fairness_gap(const FairnessConstraint& constraint, const Dataset& dataset,
                    const GroupAssignment& groups, const TrainedModel& model) {
  const Predictions predictions = model.predict_all(dataset);
  return fairness_gap(constraint, dataset, groups, predictions);
}

double accuracy(const Dataset& dataset, std::span<const std::size_t> indices,
                std::span<const int> predictions) {
  if (indices.empty()) throw Error(ErrorCode::EmptyIndexSet, "accuracy over an empty index set");
  if (predictions.size() != dataset.size()) {
    throw Error(ErrorCode::InvalidArgument, "accuracy needs one prediction per example");
  }
  std::size_t correct = 0;
  for (std::size_t i : indices) correct += predictions[i] == dataset.label(i) ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

double accuracy(const Dataset& dataset, std::span<const std::size_t> indices,
                const TrainedModel& model) {
  const Predictions predictions = model.predict_all(dataset);
  return accuracy(dataset, indices, predictions);
}

EvaluationReport evaluate(const Dataset& dataset, const GroupAssignment& groups,
                          std::span<const FairnessConstraint> constraints,
                          std::span<const std::size_t> scope, std::span<const int> predictions) {
  const GroupAssignment scoped = groups.restricted_to(scope);
  EvaluationReport report;
  report.ap = accuracy(dataset, scope, predictions);
  for (const FairnessConstraint& c : constraints) {
    const double v1 = fairness_value(c.metric, scoped.at(c.g1), dataset, predictions);
    const double v2 = fairness_value(c.metric, scoped.at(c.g2), dataset, predictions);
    report.metric_values[{c.id, c.g1}] = v1;
    report.metric_values[{c.id, c.g2}] = v2;
    report.fp_per_constraint[c.id] = v1 - v2;
  }
  return report;
}

}  // namespace fairweight
