#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fairweight/data.hpp"
#include "fairweight/grouping.hpp"
#include "fairweight/model.hpp"

namespace fairweight {

enum class MetricKind { MR, SP, FPR, FNR, FOR, FDR, AEC, Custom };

std::string to_string(MetricKind kind);
/// Accepts the short names above, case-insensitive. Throws ConfigError.
MetricKind parse_metric_kind(const std::string& text);

/// f(h, g) = sum_i c[i] * 1(h(x_i) = y_i) + c0 over the members of one group.
struct CoefficientSet {
  IndexSet indices;
  std::vector<double> c;
  double c0 = 0.0;
};

/// User-supplied metric in coefficient form. `predictions` is empty unless
/// `parameterized_by_model` is set.
struct CustomMetric {
  bool parameterized_by_model = false;
  std::function<CoefficientSet(const Dataset&, const IndexSet& group,
                               std::span<const int> predictions)>
      coefficients;
};

class MetricRegistry {
 public:
  static MetricRegistry& instance();
  void add(const std::string& id, CustomMetric metric);
  /// Throws NotFound.
  CustomMetric get(const std::string& id) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, CustomMetric> metrics_;
};

struct MetricSpec {
  MetricKind kind = MetricKind::SP;
  /// (C_fp, C_fn), required for AEC.
  std::optional<std::pair<double, double>> aec_costs;
  /// Registry key, required for Custom.
  std::optional<std::string> custom_id;

  MetricSpec() = default;
  MetricSpec(MetricKind k) : kind(k) {}  // NOLINT: implicit on purpose
  static MetricSpec aec(double c_fp, double c_fn);
  static MetricSpec custom(std::string id);

  /// True when the coefficients depend on the model's own predictions, which
  /// forces the tuner onto linear search.
  bool parameterized_by_model() const;
  void validate() const;
  std::string name() const;
};

/// The metric's coefficient set over `group`. `predictions` (indexed by
/// dataset index) is required iff the metric is parameterized by the model.
/// Errors: EmptyIndexSet, EmptyDenominator, MissingModel.
CoefficientSet coefficients(const MetricSpec& metric, const IndexSet& group,
                            const Dataset& dataset, std::span<const int> predictions = {});
CoefficientSet coefficients(const MetricSpec& metric, const IndexSet& group,
                            const Dataset& dataset, const TrainedModel* model);

double fairness_value(const MetricSpec& metric, const IndexSet& group, const Dataset& dataset,
                      std::span<const int> predictions);
double fairness_value(const MetricSpec& metric, const IndexSet& group, const Dataset& dataset,
                      const TrainedModel& model);

/// One constraint |f(h,g1) - f(h,g2)| <= epsilon between an ordered group pair.
struct FairnessConstraint {
  std::string id;
  std::string g1;
  std::string g2;
  MetricSpec metric;
  double epsilon = 0.0;

  FairnessConstraint swapped() const;
  void validate() const;
};

/// Every unordered pair of groups, each constrained with the same metric and
/// epsilon. Ids are "<g1>~<g2>".
std::vector<FairnessConstraint> pairwise_constraints(const GroupAssignment& groups,
                                                     const MetricSpec& metric, double epsilon);

/// FP = f(h,g1) - f(h,g2) in the constraint's current order.
double fairness_gap(const FairnessConstraint& constraint, const Dataset& dataset,
                    const GroupAssignment& groups, std::span<const int> predictions);
double fairness_gap(const FairnessConstraint& constraint, const Dataset& dataset,
                    const GroupAssignment& groups, const TrainedModel& model);

/// Fraction of `indices` predicted correctly. Errors: EmptyIndexSet.
double accuracy(const Dataset& dataset, std::span<const std::size_t> indices,
                std::span<const int> predictions);
double accuracy(const Dataset& dataset, std::span<const std::size_t> indices,
                const TrainedModel& model);

struct EvaluationReport {
  double ap = 0.0;
  std::map<std::string, double> fp_per_constraint;
  std::map<std::pair<std::string, std::string>, double> metric_values;
};

/// AP over `scope` and every constraint's gap, with groups restricted to
/// `scope`.
EvaluationReport evaluate(const Dataset& dataset, const GroupAssignment& groups,
                          std::span<const FairnessConstraint> constraints,
                          std::span<const std::size_t> scope, std::span<const int> predictions);

}  // namespace fairweight
