#include "fairweight/multitune.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include "fairweight/error.hpp"

namespace fairweight {
namespace {

MultiTuneResult summarize(const TuningProblem& problem, const Evaluation& e) {
  MultiTuneResult out;
  out.model = e.model;
  out.lambdas = e.lambdas;
  for (const FairnessConstraint& c : problem.constraints()) out.lambdas.try_emplace(c.id, 0.0);
  for (std::size_t k = 0; k < problem.constraints().size(); ++k) {
    out.per_constraint_fp[problem.constraints()[k].id] = e.fp[k];
  }
  out.validation_ap = e.ap;
  out.satisfied = !problem.any_violated(e);
  out.fits_performed = problem.fits();
  out.clamp_warnings = problem.clamp_warnings();
  return out;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

MultiTuneResult hill_climb(const Dataset& dataset, const DataSplit& split,
                           const GroupAssignment& groups,
                           std::span<const FairnessConstraint> constraints,
                           const WeightedLearner& learner, const TunerConfig& config) {
  TuningProblem problem(dataset, split, groups,
                        std::vector<FairnessConstraint>(constraints.begin(), constraints.end()),
                        learner, config);
  const std::size_t k = constraints.size();
  const std::size_t max_iterations = 5 * k;

  LambdaVector lambdas;
  for (const FairnessConstraint& c : constraints) lambdas[c.id] = 0.0;
  Evaluation current = problem.fit(lambdas, nullptr);

  std::size_t iterations = 0;
  std::string note;
  while (problem.any_violated(current) && iterations < max_iterations) {
    std::size_t worst = 0;
    double worst_violation = -1.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double violation = std::abs(current.fp[j]) - constraints[j].epsilon;
      if (violation > 0.0 && violation > worst_violation) {
        worst = j;
        worst_violation = violation;
      }
    }
    try {
      DimensionResult r = tune_dimension(problem, lambdas, worst, &current);
      lambdas[constraints[worst].id] = r.lambda;
      current = std::move(r.evaluation);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleWithinCap) throw;
      note = "constraint '" + constraints[worst].id + "': " + e.what();
      ++iterations;
      break;
    }
    ++iterations;
  }

  MultiTuneResult out = summarize(problem, current);
  out.lambdas = lambdas;
  out.iterations = iterations;
  if (!out.satisfied && note.empty()) {
    note = "not found after 5k iterations (k = " + std::to_string(k) + ", cap " +
           std::to_string(max_iterations) + ")";
  }
  out.note = note;
  return out;
}

GridSearchResult grid_search(const Dataset& dataset, const DataSplit& split,
                             const GroupAssignment& groups,
                             std::span<const FairnessConstraint> constraints,
                             const WeightedLearner& learner, double grid_step, double grid_max,
                             const TunerConfig& config) {
  if (!(grid_step > 0.0) || !(grid_max >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "grid search needs step > 0 and max >= 0");
  }
  TuningProblem problem(dataset, split, groups,
                        std::vector<FairnessConstraint>(constraints.begin(), constraints.end()),
                        learner, config);
  const std::size_t k = constraints.size();
  const auto per_axis = static_cast<std::size_t>(std::floor(grid_max / grid_step + 1e-9)) + 1;

  GridSearchResult out;
  for (const FairnessConstraint& c : constraints) out.lattice.constraint_ids.push_back(c.id);

  // Lambda = 0 comes first; its model supplies model-parameterized weights.
  ModelPtr unconstrained;
  std::optional<Evaluation> best;
  bool best_satisfied = false;
  std::vector<std::size_t> odometer(k, 0);
  for (bool done = false; !done;) {
    LambdaVector lambdas;
    std::vector<double> coordinates(k);
    for (std::size_t j = 0; j < k; ++j) {
      coordinates[j] = static_cast<double>(odometer[j]) * grid_step;
      lambdas[constraints[j].id] = coordinates[j];
    }
    Evaluation e = problem.fit_cold(lambdas, unconstrained.get());
    if (!unconstrained) unconstrained = e.model;
    out.lattice.points.push_back({coordinates, e.fp, e.ap});

    const bool ok = !problem.any_violated(e);
    if (!best || (ok && !best_satisfied) || (ok == best_satisfied && e.ap > best->ap)) {
      best = std::move(e);
      best_satisfied = ok;
    }

    // Last axis varies fastest.
    done = true;
    for (std::size_t axis = k; axis-- > 0;) {
      if (++odometer[axis] < per_axis) {
        done = false;
        break;
      }
      odometer[axis] = 0;
    }
  }

  out.best = summarize(problem, *best);
  out.best.iterations = out.lattice.points.size();
  if (!out.best.satisfied) out.best.note = "no lattice point satisfies every constraint";
  return out;
}

RegionSample sample_region(const Dataset& dataset, const DataSplit& split,
                           const GroupAssignment& groups,
                           std::span<const FairnessConstraint> constraints,
                           const WeightedLearner& learner, std::span<const double> lambda_1,
                           std::span<const double> lambda_2, const TunerConfig& config) {
  if (constraints.size() != 2) {
    throw Error(ErrorCode::InvalidArgument, "region sampling takes exactly two constraints");
  }
  TuningProblem problem(dataset, split, groups,
                        std::vector<FairnessConstraint>(constraints.begin(), constraints.end()),
                        learner, config);
  ModelPtr unconstrained;
  if (problem.any_parameterized()) unconstrained = problem.fit_cold({}, nullptr).model;

  RegionSample out;
  out.constraint_ids = {constraints[0].id, constraints[1].id};
  for (double l1 : lambda_1) {
    for (double l2 : lambda_2) {
      const Evaluation e = problem.fit_cold({{constraints[0].id, l1}, {constraints[1].id, l2}},
                                            unconstrained.get());
      out.points.push_back({{l1, l2}, e.fp, e.ap});
    }
  }
  return out;
}

std::string RegionSample::to_csv() const {
  if (constraint_ids.size() != 2) {
    throw Error(ErrorCode::InvalidArgument, "region CSV needs exactly two constraints");
  }
  std::string out = "lambda_1,lambda_2,fp_1,fp_2,ap\n";
  for (const LatticePoint& p : points) {
    out += format_number(p.lambdas[0]) + ',' + format_number(p.lambdas[1]) + ',' +
           format_number(p.fp[0]) + ',' + format_number(p.fp[1]) + ',' + format_number(p.ap) +
           '\n';
  }
  return out;
}

void RegionSample::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << to_csv();
}

}  // namespace fairweight
