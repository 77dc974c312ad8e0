// Acceptance run: one PASS/FAIL line per criterion. Every tolerance, size and
// seed is pinned below and was fixed before the run. The exit code is 0 when
// every criterion ran to completion, whatever its verdict; a crash is nonzero.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fairweight/error.hpp"
#include "fairweight/grouping.hpp"
#include "fairweight/learners.hpp"
#include "fairweight/metrics.hpp"
#include "fairweight/multitune.hpp"
#include "fairweight/synth.hpp"
#include "fairweight/tuning.hpp"
#include "fairweight/weighting.hpp"
#include "oracles.hpp"

using namespace fairweight;

namespace {

constexpr std::uint64_t kSeed = 42;
const SplitSpec kSplit{0.6, 0.2, 0.2, kSeed};

// 1. Objective identity.
constexpr int kIdentityTrials = 1000;
constexpr std::size_t kIdentityMaxRows = 64;
constexpr double kIdentityTol = 1e-9;
constexpr double kIdentitySeconds = 10;
// 2. Counting equivalence.
constexpr int kCountingInstances = 500;
constexpr double kCountingTol = 1e-12;
constexpr double kCountingSeconds = 5;
// 3. Exact monotonicity.
constexpr int kMonotoneDatasets = 20;
constexpr std::size_t kMonotoneRows = 120;
constexpr std::size_t kMaxThresholds = 200;
constexpr double kMonotoneSeconds = 30;
// 4. Planted SP bias.
constexpr std::size_t kPlantedN = 2000;
constexpr double kPlantedGap = 0.2;
constexpr double kPlantedGapTol = 0.03;
constexpr double kSpEpsilon = 0.03;
constexpr double kSpTestBound = 0.06;
constexpr double kSpMaxAccuracyDrop = 0.05;
constexpr double kSpSeconds = 60;
// 5. FDR through linear search.
constexpr double kFdrEpsilon = 0.05;
constexpr double kFdrMinBaseline = 0.15;
constexpr double kFdrSeconds = 120;
// 6. Replication.
constexpr int kReplicationSettings = 50;
constexpr std::size_t kReplicationMaxRows = 32;
constexpr double kReplicationSeconds = 30;
// 7. Hill-climb against the grid.
constexpr std::size_t kMultiN = 2000;
constexpr double kMultiEpsilon = 0.03;
constexpr double kGridStep = 0.01;
constexpr double kGridMax = 1.0;
constexpr double kMinFitRatio = 5.0;
constexpr double kMultiSeconds = 600;
// 8. Warm start.
constexpr double kWarmRatio = 0.8;
constexpr double kWarmSeconds = 300;
const std::vector<double> kSweepEpsilons{0.15, 0.12, 0.1, 0.08, 0.06, 0.05, 0.04, 0.03, 0.02, 0.01};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

bool all_passed = true;

void run(int number, const char* name, double limit, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("error: ") + e.what()};
  }
  const double elapsed = seconds_since(start);
  const bool in_time = elapsed < limit;
  const bool pass = out.pass && in_time;
  all_passed = all_passed && pass;
  std::printf("criterion %d: %s %s (%s; %.2fs, limit %.0fs%s)\n", number, pass ? "PASS" : "FAIL",
              name, out.detail.c_str(), elapsed, limit, in_time ? "" : ", over time");
  std::fflush(stdout);
}

const std::vector<MetricSpec>& builtin_metrics() {
  static const std::vector<MetricSpec> metrics{
      MetricKind::MR,  MetricKind::SP,  MetricKind::FPR,         MetricKind::FNR,
      MetricKind::FOR, MetricKind::FDR, MetricSpec::aec(0.7, 2.5)};
  return metrics;
}

std::vector<int> random_predictions(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<int> h(n);
  for (int& v : h) v = coin(rng);
  return h;
}

Outcome objective_identity() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> lam(-2.0, 2.0);
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double worst = 0.0;
  for (int trial = 0; trial < kIdentityTrials; ++trial) {
    const Dataset d = fwtest::random_instance(rng, 4 + rng() % (kIdentityMaxRows - 3));
    const std::vector<int> h = random_predictions(rng, d.size());
    const fwtest::TableModel model(h);
    const GroupAssignment g = assign_groups(d, GroupingSpec::by_attribute("g"));
    const double lambda = lam(rng);
    for (const MetricSpec& m : builtin_metrics()) {
      if (!fwtest::evaluable(m.kind, d, g.at("A"), h) || !fwtest::evaluable(m.kind, d, g.at("B"), h)) {
        ++skipped;
        continue;
      }
      const FairnessConstraint c{"ab", "A", "B", m, 0.0};
      const WeightVector w = derive_weights(lambda, c, d, g, &model, /*clamp=*/false);
      double lhs = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) lhs += w.values[i] * (h[i] == d.label(i));
      lhs /= static_cast<double>(d.size());
      const auto c0 = [&](const IndexSet& group) {
        return coefficients(m, group, d, m.parameterized_by_model() ? std::span<const int>(h)
                                                                     : std::span<const int>{})
            .c0;
      };
      const double rhs = accuracy(d, d.all_indices(), h) + lambda * fairness_gap(c, d, g, h) -
                         lambda * (c0(g.at("A")) - c0(g.at("B")));
      worst = std::max(worst, std::abs(lhs - rhs));
      ++checked;
    }
  }
  return {worst <= kIdentityTol, std::to_string(checked) + " checks, " + std::to_string(skipped) +
                                     " skipped for empty denominators, max error " +
                                     fmt("%.2e", worst) + " <= " + fmt("%.0e", kIdentityTol)};
}

Outcome counting_equivalence() {
  std::mt19937_64 rng(kSeed + 1);
  std::size_t checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < kCountingInstances; ++trial) {
    const Dataset d = fwtest::random_instance(rng, 4 + rng() % 61);
    const std::vector<int> h = random_predictions(rng, d.size());
    const GroupAssignment g = assign_groups(d, GroupingSpec::by_attribute("g"));
    for (const MetricSpec& m : builtin_metrics()) {
      for (const auto& [id, members] : g.groups()) {
        if (!fwtest::evaluable(m.kind, d, members, h)) continue;
        const double coded = fairness_value(m, members, d, h);
        const double counted = m.kind == MetricKind::AEC
                                   ? fwtest::counted_value(m.kind, d, members, h, 0.7, 2.5)
                                   : fwtest::counted_value(m.kind, d, members, h);
        worst = std::max(worst, std::abs(coded - counted));
        ++checked;
      }
    }
  }
  return {worst <= kCountingTol, std::to_string(checked) + " checks, max error " +
                                     fmt("%.2e", worst) + " <= " + fmt("%.0e", kCountingTol)};
}

Outcome exact_monotonicity() {
  std::mt19937_64 rng(kSeed + 2);
  std::normal_distribution<double> normal;
  std::size_t violations = 0;
  std::size_t sequences = 0;
  std::size_t most_thresholds = 0;
  for (int t = 0; t < kMonotoneDatasets; ++t) {
    std::vector<int> labels(kMonotoneRows);
    std::vector<std::string> groups(kMonotoneRows);
    std::vector<double> score(kMonotoneRows);
    for (std::size_t i = 0; i < kMonotoneRows; ++i) {
      const bool a = i % 2 == 0;
      groups[i] = a ? "A" : "B";
      score[i] = normal(rng) + (a ? 0.5 : -0.5);
      labels[i] = score[i] + 0.8 * normal(rng) > 0.0;
    }
    const Dataset d = fwtest::indexed_dataset(labels, groups, score);
    const GroupAssignment g = assign_groups(d, GroupingSpec::by_attribute("g"));
    const fwtest::ThresholdLearner learner;
    std::size_t thresholds = 0;
    for (const auto& c : learner.candidates(d, d.all_indices())) thresholds += c.size();
    most_thresholds = std::max(most_thresholds, thresholds);
    if (thresholds > kMaxThresholds) return {false, "oracle exceeds the threshold budget"};

    for (MetricKind kind : {MetricKind::MR, MetricKind::SP, MetricKind::FPR, MetricKind::FNR}) {
      const FairnessConstraint c{"ab", "A", "B", kind, 0.0};
      double last_fp = -INFINITY;
      double last_ap = INFINITY;
      for (int step = 0; step <= 40; ++step) {
        const double lambda = 0.05 * step;
        const WeightVector w = derive_weights(lambda, c, d, g, nullptr, /*clamp=*/false);
        const ModelPtr m = learner.fit(d, d.all_indices(), w.values, 0, nullptr);
        const Predictions h = m->predict_all(d);
        const double fp = fairness_gap(c, d, g, h);
        const double ap = accuracy(d, d.all_indices(), h);
        if (fp < last_fp) ++violations;
        if (ap > last_ap) ++violations;
        last_fp = fp;
        last_ap = ap;
      }
      ++sequences;
    }
  }
  return {violations == 0, std::to_string(sequences) + " lambda paths (MR, SP, FPR, FNR), " +
                               std::to_string(violations) + " violations, at most " +
                               std::to_string(most_thresholds) + " thresholds"};
}

struct SpRun {
  bool satisfied = false;
  double validation_gap = 0.0;
  double test_gap = 0.0;
  double drop = 0.0;
};

SpRun planted_sp(std::uint64_t seed) {
  const Dataset d = generate_synthetic(planted_bias_spec(kPlantedGap, kPlantedN, seed));
  const GroupAssignment g = assign_groups(d, GroupingSpec::by_attribute("group"));
  const DataSplit s = split(d, {kSplit.train_fraction, kSplit.validation_fraction,
                                kSplit.test_fraction, seed});
  const LogisticRegression learner;
  const FairnessConstraint c{"ab", "a", "b", MetricKind::SP, kSpEpsilon};
  TunerConfig config;
  config.seed = seed;
  const TuneResult r = tune_single(d, s, g, c, learner, config);
  const ModelPtr baseline = learner.fit_unweighted(d, s.train, seed);
  const Predictions h = r.model->predict_all(d);
  return {r.satisfied, r.validation_fp, fairness_gap(c, d, g.restricted_to(s.test), h),
          accuracy(d, s.test, *baseline) - accuracy(d, s.test, h)};
}

Outcome planted_sp_enforcement() {
  const SynthSpec spec = planted_bias_spec(kPlantedGap, kPlantedN, kSeed);
  const double planted = planted_sp_gap(spec.groups[0], spec.groups[1]);
  const SpRun r = planted_sp(kSeed);
  const bool pass = std::abs(planted - kPlantedGap) <= kPlantedGapTol && r.satisfied &&
                    std::abs(r.validation_gap) <= kSpEpsilon &&
                    std::abs(r.test_gap) <= kSpTestBound && r.drop <= kSpMaxAccuracyDrop;
  return {pass, "seed " + std::to_string(kSeed) + ", planted gap " + fmt("%.3f", planted) +
                    ", validation |gap| " + fmt("%.4f", std::abs(r.validation_gap)) + " <= " +
                    fmt("%.2f", kSpEpsilon) + ", test |gap| " + fmt("%.4f", std::abs(r.test_gap)) +
                    " <= " + fmt("%.2f", kSpTestBound) + ", test accuracy drop " +
                    fmt("%.4f", r.drop) + " <= " + fmt("%.2f", kSpMaxAccuracyDrop)};
}

// Group-blind learner: drop the generator's group indicator columns so the
// model shares one decision boundary across groups.
Dataset without_group_indicators(const Dataset& d) {
  std::vector<std::size_t> keep;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d.feature_count(); ++j) {
    if (d.feature_names()[j].rfind("g_", 0) == 0) continue;
    keep.push_back(j);
    names.push_back(d.feature_names()[j]);
  }
  std::vector<Example> rows = d.examples();
  for (Example& e : rows) {
    std::vector<double> f;
    for (std::size_t j : keep) f.push_back(e.features[j]);
    e.features = std::move(f);
  }
  return Dataset(std::move(rows), std::move(names), d.label_name(), d.attribute_names());
}

Outcome fdr_linear_search() {
  // Same score distribution, a 70/30 split of the population and much noisier
  // labels in the smaller group, so precision differs at any shared boundary.
  const SynthSpec spec{kPlantedN, {{"a", 0.7, 0.0, 0.2}, {"b", 0.3, 0.0, 1.2}}, kSeed};
  const Dataset d = without_group_indicators(generate_synthetic(spec));
  const GroupAssignment g = assign_groups(d, GroupingSpec::by_attribute("group"));
  const DataSplit s = split(d, kSplit);
  const LogisticRegression learner;
  const FairnessConstraint c{"ab", "a", "b", MetricKind::FDR, kFdrEpsilon};
  const ModelPtr baseline = learner.fit_unweighted(d, s.train, kSeed);
  const double baseline_gap = fairness_gap(c, d, g.restricted_to(s.validation), *baseline);
  TunerConfig config;
  config.seed = kSeed;
  const TuneResult r = tune_single(d, s, g, c, learner, config);
  const bool linear = r.probes.size() >= 2 && std::abs(std::abs(r.probes[1].lambda) - config.delta) < 1e-12;
  const bool pass = std::abs(baseline_gap) >= kFdrMinBaseline && r.satisfied &&
                    std::abs(r.validation_fp) <= kFdrEpsilon && linear;
  return {pass, "baseline validation |gap| " + fmt("%.4f", std::abs(baseline_gap)) + " >= " +
                    fmt("%.2f", kFdrMinBaseline) + ", tuned |gap| " +
                    fmt("%.4f", std::abs(r.validation_fp)) + " <= " + fmt("%.2f", kFdrEpsilon) +
                    ", lambda " + fmt("%.4f", r.lambda) + ", " + std::to_string(r.fits) +
                    " fits in delta steps"};
}

Outcome replication() {
  std::mt19937_64 rng(kSeed + 3);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> wdist(0, 3);
  const LogisticRegression logreg;
  const DecisionTree tree;
  int mismatches = 0;
  for (int trial = 0; trial < kReplicationSettings; ++trial) {
    const std::size_t n = 8 + rng() % (kReplicationMaxRows - 7);
    std::vector<Example> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      rows[i].features.resize(2);
      for (double& v : rows[i].features) {
        v = std::round(normal(rng) * 4.0) / 4.0;
        s += v;
      }
      rows[i].label = s + normal(rng) > 0.0;
    }
    rows[0].label = 0;
    rows[1].label = 1;
    const Dataset d(rows, {"x0", "x1"}, "y");
    std::vector<double> w(n);
    for (double& v : w) v = wdist(rng);
    w[0] = std::max(w[0], 1.0);
    w[1] = std::max(w[1], 1.0);
    std::vector<Example> copies;
    for (std::size_t i = 0; i < n; ++i) {
      for (int r = 0; r < static_cast<int>(w[i]); ++r) copies.push_back(rows[i]);
    }
    const Dataset rep(copies, {"x0", "x1"}, "y");
    for (const WeightedLearner* learner : {static_cast<const WeightedLearner*>(&logreg),
                                           static_cast<const WeightedLearner*>(&tree)}) {
      const ModelPtr weighted = learner->fit(d, d.all_indices(), w, 0, nullptr);
      const ModelPtr replicated = learner->fit_unweighted(rep, rep.all_indices(), 0);
      if (weighted->predict_all(d) != replicated->predict_all(d)) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(kReplicationSettings) + " settings x 2 learners, " +
                               std::to_string(mismatches) + " prediction mismatches"};
}

Dataset three_groups(std::uint64_t seed) {
  return generate_synthetic({kMultiN, {{"a", 1.0 / 3, 0.5, 0.5}, {"b", 1.0 / 3, 0.0, 0.5},
                                       {"c", 1.0 / 3, -0.5, 0.5}}, seed});
}

// The two adjacent pairs span the two grid axes; each is oriented so its gap
// starts negative and the nonnegative grid can close it.
const std::vector<FairnessConstraint> kAdjacentPairs{
    {"ba", "b", "a", MetricKind::SP, kMultiEpsilon}, {"cb", "c", "b", MetricKind::SP, kMultiEpsilon}};

Outcome multi_constraint() {
  const Dataset d = three_groups(kSeed);
  const GroupAssignment g = assign_groups(d, GroupingSpec::by_attribute("group"));
  const DataSplit s = split(d, kSplit);
  const LogisticRegression learner;
  const auto& cs = kAdjacentPairs;
  TunerConfig config;
  config.seed = kSeed;
  const GridSearchResult grid = grid_search(d, s, g, cs, learner, kGridStep, kGridMax, config);
  const MultiTuneResult hc = hill_climb(d, s, g, cs, learner, config);
  const double ratio = static_cast<double>(grid.best.fits_performed) /
                       static_cast<double>(std::max<std::size_t>(1, hc.fits_performed));
  const FairnessConstraint ac{"ac", "a", "c", MetricKind::SP, kMultiEpsilon};
  const double ac_gap = fairness_gap(ac, d, g.restricted_to(s.validation), *hc.model);
  const bool pass = (!grid.best.satisfied || hc.satisfied) && ratio >= kMinFitRatio;
  std::string detail = std::string("grid ") + (grid.best.satisfied ? "feasible" : "infeasible") +
                       " in " + std::to_string(grid.best.fits_performed) + " fits, hill-climb " +
                       (hc.satisfied ? "satisfied" : "unsatisfied") + " in " +
                       std::to_string(hc.fits_performed) + " fits (" +
                       std::to_string(hc.iterations) + " iterations), fit ratio " +
                       fmt("%.1f", ratio) + " >= " + fmt("%.0f", kMinFitRatio);
  for (const auto& [id, fp] : hc.per_constraint_fp) detail += ", |" + id + "| " + fmt("%.4f", std::abs(fp));
  detail += ", unconstrained pair |ac| " + fmt("%.4f", std::abs(ac_gap));
  if (!hc.note.empty()) detail += ", note: " + hc.note;
  return {pass, detail};
}

double sweep_seconds(bool warm, std::size_t& fits) {
  const Dataset d = generate_synthetic(planted_bias_spec(kPlantedGap, kPlantedN, kSeed));
  const GroupAssignment g = assign_groups(d, GroupingSpec::by_attribute("group"));
  const DataSplit s = split(d, kSplit);
  const LogisticRegression learner;
  TunerConfig config;
  config.seed = kSeed;
  config.warm_start = warm;
  fits = 0;
  const auto start = Clock::now();
  for (double eps : kSweepEpsilons) {
    fits += tune_single(d, s, g, {"ab", "a", "b", MetricKind::SP, eps}, learner, config).fits;
  }
  return seconds_since(start);
}

Outcome warm_start() {
  std::size_t cold_fits = 0;
  std::size_t warm_fits = 0;
  const double cold = sweep_seconds(false, cold_fits);
  const double warm = sweep_seconds(true, warm_fits);
  const double ratio = warm / cold;
  return {ratio <= kWarmRatio, std::to_string(kSweepEpsilons.size()) + " epsilons, cold " +
                                   fmt("%.2f", cold) + "s (" + std::to_string(cold_fits) +
                                   " fits), warm " + fmt("%.2f", warm) + "s (" +
                                   std::to_string(warm_fits) + " fits), ratio " +
                                   fmt("%.3f", ratio) + " <= " + fmt("%.1f", kWarmRatio)};
}

}  // namespace

int main() {
  run(1, "objective identity", kIdentitySeconds, objective_identity);
  run(2, "counting equivalence", kCountingSeconds, counting_equivalence);
  run(3, "exact monotonicity on the threshold oracle", kMonotoneSeconds, exact_monotonicity);
  run(4, "planted-bias SP enforcement", kSpSeconds, planted_sp_enforcement);
  run(5, "FDR through linear search", kFdrSeconds, fdr_linear_search);
  run(6, "weight-replication equivalence", kReplicationSeconds, replication);
  run(7, "hill-climb against the grid", kMultiSeconds, multi_constraint);
  run(8, "warm-start sweep speedup", kWarmSeconds, warm_start);
  std::printf("criterion 9: NOTE external-dataset tables are not reproduced; criteria 4, 5, 7 "
              "and 8 stand in for them at desk scale\n");

  // Context for criterion 4, which rests on a 400-row validation split.
  int passes = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SpRun r = planted_sp(seed);
    passes += r.satisfied && std::abs(r.validation_gap) <= kSpEpsilon &&
              std::abs(r.test_gap) <= kSpTestBound && r.drop <= kSpMaxAccuracyDrop;
  }
  std::printf("info: criterion 4 conditions hold on %d of seeds 1..20\n", passes);

  // Hill-climb alone, without the grid, for context on criterion 7.
  int satisfied = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Dataset d = three_groups(seed);
    const GroupAssignment g = assign_groups(d, GroupingSpec::by_attribute("group"));
    TunerConfig config;
    config.seed = seed;
    satisfied += hill_climb(d, split(d, {0.6, 0.2, 0.2, seed}), g, kAdjacentPairs,
                            LogisticRegression{}, config).satisfied;
  }
  std::printf("info: hill-climb satisfies both criterion 7 pairs on %d of seeds 1..20\n", satisfied);
  std::printf("summary: %s\n", all_passed ? "all criteria passed" : "some criteria failed");
  return 0;
}
