#include "fairweight/tuning.hpp"

#include <cmath>

#include "fairweight/error.hpp"

namespace fairweight {

void TunerConfig::validate() const {
  if (!(tau > 0.0 && tau < delta && delta < lambda_cap)) {
    throw Error(ErrorCode::InvalidArgument, "tuner config needs 0 < tau < delta < lambda_cap");
  }
  if (max_linear_steps == 0) {
    throw Error(ErrorCode::InvalidArgument, "max_linear_steps must be positive");
  }
}

TuningProblem::TuningProblem(const Dataset& dataset, const DataSplit& split,
                             const GroupAssignment& groups,
                             std::vector<FairnessConstraint> constraints,
                             const WeightedLearner& learner, TunerConfig config)
    : dataset_(dataset),
      split_(split),
      groups_(groups),
      constraints_(std::move(constraints)),
      learner_(learner),
      config_(config),
      train_groups_(groups.restricted_to(split.train)),
      validation_groups_(groups.restricted_to(split.validation)) {
  config_.validate();
  if (constraints_.empty()) throw Error(ErrorCode::InvalidArgument, "no constraints to tune");
  for (const FairnessConstraint& c : constraints_) {
    c.validate();
    for (const std::string* id : {&c.g1, &c.g2}) {
      if (train_groups_.at(*id).empty() || validation_groups_.at(*id).empty()) {
        throw Error(ErrorCode::EmptyGroup, "group '" + *id + "' of constraint '" + c.id +
                                               "' is empty on the train or validation split");
      }
    }
    any_parameterized_ = any_parameterized_ || c.metric.parameterized_by_model();
  }
}

Evaluation TuningProblem::fit(const LambdaVector& lambdas, const TrainedModel* weight_source) {
  return run(lambdas, weight_source, config_.warm_start && learner_.supports_warm_start());
}

Evaluation TuningProblem::fit_cold(const LambdaVector& lambdas,
                                   const TrainedModel* weight_source) {
  return run(lambdas, weight_source, false);
}

Evaluation TuningProblem::run(const LambdaVector& lambdas, const TrainedModel* weight_source,
                              bool warm) {
  Predictions source_predictions;
  if (any_parameterized_ && weight_source != nullptr) {
    source_predictions = weight_source->predict_all(dataset_);
  }
  const WeightVector weights =
      derive_weights_multi(lambdas, constraints_, dataset_, train_groups_, source_predictions,
                           split_.train.size(), /*clamp=*/true);

  Evaluation out;
  out.lambdas = lambdas;
  out.clamped = weights.clamped;
  out.model = learner_.fit(dataset_, split_.train, weights.values, config_.seed,
                           warm ? last_model_.get() : nullptr);
  ++fits_;
  if (weights.clamp_occurred()) ++clamp_warnings_;
  if (warm) last_model_ = out.model;

  const Predictions predictions = out.model->predict_all(dataset_);
  out.ap = accuracy(dataset_, split_.validation, predictions);
  out.fp.reserve(constraints_.size());
  for (const FairnessConstraint& c : constraints_) {
    out.fp.push_back(fairness_gap(c, dataset_, validation_groups_, predictions));
  }
  log_.push_back(out);
  return out;
}

bool TuningProblem::violated(const Evaluation& e, std::size_t index) const {
  return std::abs(e.fp[index]) > constraints_[index].epsilon;
}

bool TuningProblem::any_violated(const Evaluation& e) const {
  for (std::size_t k = 0; k < constraints_.size(); ++k) {
    if (violated(e, k)) return true;
  }
  return false;
}

Bracket exponential_search(const ProbeFn& probe, const Probe& start, double epsilon,
                           const TunerConfig& config) {
  Bracket b;
  b.lower = 0.0;
  b.lower_probe = start;
  b.upper = 1.0;
  if (b.upper > config.lambda_cap) {
    throw Error(ErrorCode::InfeasibleWithinCap, "lambda cap is below the first probe at 1");
  }
  b.upper_probe = probe(b.upper, nullptr);
  while (b.upper_probe.fp < -epsilon) {
    if (2.0 * b.upper > config.lambda_cap) {
      throw Error(ErrorCode::InfeasibleWithinCap,
                  "gap still below -epsilon at lambda " + std::to_string(b.upper) +
                      " and the next doubling exceeds the cap");
    }
    b.lower = b.upper;
    b.lower_probe = std::move(b.upper_probe);
    b.upper = 2.0 * b.upper;
    b.upper_probe = probe(b.upper, nullptr);
  }
  return b;
}

Bracket linear_search(const ProbeFn& probe, const Probe& start, double epsilon,
                      const TunerConfig& config) {
  Bracket b;
  b.lower = 0.0;
  b.lower_probe = start;
  // Multiples of delta rather than repeated addition, so bounds stay exact-ish.
  std::size_t step = 1;
  b.upper = config.delta;
  b.upper_probe = probe(b.upper, start.model.get());
  while (b.upper_probe.fp < -epsilon) {
    if (step >= config.max_linear_steps ||
        static_cast<double>(step + 1) * config.delta > config.lambda_cap) {
      throw Error(ErrorCode::InfeasibleWithinCap,
                  "linear search gave up at lambda " + std::to_string(b.upper));
    }
    b.lower = b.upper;
    b.lower_probe = std::move(b.upper_probe);
    ++step;
    b.upper = static_cast<double>(step) * config.delta;
    b.upper_probe = probe(b.upper, b.lower_probe.model.get());
  }
  return b;
}

Probe binary_search(const ProbeFn& probe, Bracket bracket, double epsilon,
                    bool model_parameterized, const TunerConfig& config) {
  while (bracket.upper - bracket.lower >= config.tau) {
    const double mid = (bracket.lower + bracket.upper) / 2.0;
    Probe p = probe(mid, model_parameterized ? bracket.lower_probe.model.get() : nullptr);
    if (p.fp < -epsilon) {
      bracket.lower = mid;
      bracket.lower_probe = std::move(p);
    } else {
      bracket.upper = mid;
      bracket.upper_probe = std::move(p);
    }
  }
  return bracket.upper_probe;
}

DimensionResult tune_dimension(TuningProblem& problem, const LambdaVector& lambdas,
                               std::size_t index, const Evaluation* current) {
  const auto& constraints = problem.constraints();
  if (index >= constraints.size()) {
    throw Error(ErrorCode::InvalidArgument, "constraint index out of range");
  }
  const FairnessConstraint& constraint = constraints[index];
  const double epsilon = constraint.epsilon;
  const TrainedModel* outer_source = current != nullptr ? current->model.get() : nullptr;

  LambdaVector base = lambdas;
  base[constraint.id] = 0.0;
  const auto current_entry = lambdas.find(constraint.id);
  const bool reuse = current != nullptr &&
                     (current_entry == lambdas.end() || current_entry->second == 0.0);
  const Evaluation start = reuse ? *current : problem.fit(base, outer_source);

  DimensionResult result;
  result.evaluation = start;
  result.lambda = 0.0;
  const double fp0 = start.fp[index];
  if (std::abs(fp0) <= epsilon) {
    result.satisfied = true;
    return result;
  }

  // A positive gap is handled by flipping the group order, which is the same
  // as searching negative lambda in the original order.
  const double sign = fp0 > 0.0 ? -1.0 : 1.0;
  result.swapped = sign < 0.0;

  std::vector<std::pair<Probe, Evaluation>> trail;
  const ProbeFn probe = [&](double lambda, const TrainedModel* source) {
    LambdaVector at = base;
    at[constraint.id] = sign * lambda;
    Evaluation e = problem.fit(at, source != nullptr ? source : outer_source);
    Probe p{lambda, e.model, e.ap, sign * e.fp[index]};
    trail.emplace_back(p, std::move(e));
    return p;
  };

  const Probe origin{0.0, start.model, start.ap, sign * fp0};
  const bool parameterized = constraint.metric.parameterized_by_model();
  const Bracket bracket = parameterized ? linear_search(probe, origin, epsilon, problem.config())
                                        : exponential_search(probe, origin, epsilon, problem.config());
  const Probe chosen = binary_search(probe, bracket, epsilon, parameterized, problem.config());

  const auto find_evaluation = [&](const Probe& p) -> const Evaluation& {
    for (const auto& [q, e] : trail) {
      if (q.model == p.model) return e;
    }
    throw Error(ErrorCode::InvalidArgument, "probe not found in trail");
  };

  if (std::abs(chosen.fp) <= epsilon) {
    result.evaluation = find_evaluation(chosen);
    result.lambda = sign * chosen.lambda;
    result.satisfied = true;
    return result;
  }
  // Non-monotone validation response: fall back to the most accurate probe
  // that did satisfy this constraint, if any.
  const std::pair<Probe, Evaluation>* best = nullptr;
  for (const auto& entry : trail) {
    if (std::abs(entry.first.fp) <= epsilon && (best == nullptr || entry.first.ap > best->first.ap)) {
      best = &entry;
    }
  }
  if (best != nullptr) {
    result.evaluation = best->second;
    result.lambda = sign * best->first.lambda;
    result.satisfied = true;
  } else {
    result.evaluation = find_evaluation(chosen);
    result.lambda = sign * chosen.lambda;
    result.satisfied = false;
  }
  return result;
}

namespace {

TradeoffPoint to_point(const Evaluation& e, const std::string& id) {
  auto it = e.lambdas.find(id);
  return {it == e.lambdas.end() ? 0.0 : it->second, e.ap, e.fp.front()};
}

// Fits the unconstrained model and returns the working-order probe function
// the bracket-search wrappers need.
struct NormalizedStart {
  Probe origin;
  double sign = 1.0;
};

NormalizedStart normalize(TuningProblem& problem) {
  const Evaluation e0 = problem.fit({}, nullptr);
  const double fp0 = e0.fp.front();
  const double sign = fp0 > 0.0 ? -1.0 : 1.0;
  return {{0.0, e0.model, e0.ap, sign * fp0}, sign};
}

ProbeFn make_probe(TuningProblem& problem, double sign) {
  return [&problem, sign](double lambda, const TrainedModel* source) {
    const Evaluation e = problem.fit({{problem.constraints().front().id, sign * lambda}}, source);
    return Probe{lambda, e.model, e.ap, sign * e.fp.front()};
  };
}

}  // namespace

TuneResult tune_single(const Dataset& dataset, const DataSplit& split,
                       const GroupAssignment& groups, const FairnessConstraint& constraint,
                       const WeightedLearner& learner, const TunerConfig& config) {
  TuningProblem problem(dataset, split, groups, {constraint}, learner, config);
  const DimensionResult r = tune_dimension(problem, {}, 0, nullptr);

  TuneResult out;
  out.model = r.evaluation.model;
  out.lambda = r.lambda;
  out.validation_ap = r.evaluation.ap;
  out.validation_fp = r.evaluation.fp.front();
  out.satisfied = r.satisfied && std::abs(out.validation_fp) <= constraint.epsilon;
  out.swapped = r.swapped;
  for (const Evaluation& e : problem.log()) out.probes.push_back(to_point(e, constraint.id));
  out.clamp_warnings = problem.clamp_warnings();
  out.fits = problem.fits();
  return out;
}

Bracket exponential_search(const Dataset& dataset, const DataSplit& split,
                           const GroupAssignment& groups, const FairnessConstraint& constraint,
                           const WeightedLearner& learner, const TunerConfig& config) {
  TuningProblem problem(dataset, split, groups, {constraint}, learner, config);
  const NormalizedStart start = normalize(problem);
  return exponential_search(make_probe(problem, start.sign), start.origin, constraint.epsilon,
                            config);
}

Bracket linear_search(const Dataset& dataset, const DataSplit& split,
                      const GroupAssignment& groups, const FairnessConstraint& constraint,
                      const WeightedLearner& learner, const TunerConfig& config) {
  TuningProblem problem(dataset, split, groups, {constraint}, learner, config);
  const NormalizedStart start = normalize(problem);
  return linear_search(make_probe(problem, start.sign), start.origin, constraint.epsilon, config);
}

}  // namespace fairweight
