#include <gtest/gtest.h>

#include <random>

#include "fairweight/error.hpp"
#include "fairweight/learners.hpp"
#include "fairweight/metrics.hpp"

using namespace fairweight;

namespace {

Dataset from_points(const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
  std::vector<Example> rows;
  for (std::size_t i = 0; i < x.size(); ++i) rows.push_back({x[i], y[i], {}});
  std::vector<std::string> names;
  for (std::size_t j = 0; j < x.front().size(); ++j) names.push_back("x" + std::to_string(j));
  return Dataset(rows, names, "y");
}

Dataset random_points(std::mt19937_64& rng, std::size_t n, std::size_t dims) {
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> x(n, std::vector<double>(dims));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double& v : x[i]) {
      v = std::round(normal(rng) * 4.0) / 4.0;
      s += v;
    }
    y[i] = s + normal(rng) > 0.0;
  }
  y[0] = 0;
  y[1] = 1;
  return from_points(x, y);
}

// Each row repeated weight-many times, zero-weight rows dropped.
Dataset replicate(const Dataset& d, const std::vector<double>& w) {
  std::vector<Example> rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (int r = 0; r < static_cast<int>(w[i]); ++r) rows.push_back(d[i]);
  }
  return Dataset(rows, d.feature_names(), d.label_name());
}

void expect_code(ErrorCode code, const std::function<void()>& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(LogReg, SeparableToy) {
  const Dataset d = from_points({{0, 0}, {1, 0}, {0, 1}, {3, 3}, {4, 3}, {3, 4}}, {0, 0, 0, 1, 1, 1});
  const LogisticRegression learner;
  const ModelPtr m = learner.fit_unweighted(d, d.all_indices(), 0);
  EXPECT_EQ(accuracy(d, d.all_indices(), *m), 1.0);
}

TEST(LogReg, AllWeightOnOnePositive) {
  const Dataset d = from_points({{0}, {1}, {2}, {3}}, {0, 0, 1, 0});
  const std::vector<double> w{0, 0, 1, 0};
  const ModelPtr m = LogisticRegression().fit(d, d.all_indices(), w, 0, nullptr);
  EXPECT_EQ(m->predict(d.features(2)), 1);
}

TEST(LogReg, WarmStartFromConvergedModel) {
  std::mt19937_64 rng(2);
  const Dataset d = random_points(rng, 80, 3);
  const std::vector<double> w(d.size(), 1.0);
  LogRegConfig long_run;
  long_run.epochs = 50000;
  long_run.tolerance = 1e-10;
  long_run.learning_rate = 0.5;
  const auto converged = fit_logreg(d, d.all_indices(), w, long_run, 0);
  const WeightedLogLoss loss(d, d.all_indices(), w, 0.0);
  const auto params = [](const LogisticModel& m) {
    std::vector<double> p{m.intercept()};
    p.insert(p.end(), m.coefficients().begin(), m.coefficients().end());
    return p;
  };
  LogRegConfig one;
  one.epochs = 1;
  one.tolerance = 0.0;
  const auto warm = fit_logreg(d, d.all_indices(), w, one, 0, converged.get());
  EXPECT_NEAR(loss.value(params(*warm)), loss.value(params(*converged)), 1e-6);
  const auto cold = fit_logreg(d, d.all_indices(), w, one, 0, nullptr);
  EXPECT_GT(loss.value(params(*cold)), loss.value(params(*converged)) + 1e-3);
}

TEST(LogReg, Errors) {
  const Dataset d = from_points({{0}, {1}, {2}}, {1, 1, 1});
  const std::vector<double> ones(3, 1.0);
  expect_code(ErrorCode::SingleClassTrainingSet,
              [&] { fit_logreg(d, d.all_indices(), ones, {}, 0); });
  expect_code(ErrorCode::EmptyTrainingSet, [&] { fit_logreg(d, IndexSet{}, ones, {}, 0); });
  const Dataset mixed = from_points({{0}, {1}}, {0, 1});
  expect_code(ErrorCode::InvalidArgument,
              [&] { fit_logreg(mixed, mixed.all_indices(), std::vector<double>{1, -1}, {}, 0); });
  LogRegConfig bad;
  bad.learning_rate = 1e308;
  bad.tolerance = 0.0;
  expect_code(ErrorCode::NonFiniteLoss, [&] {
    fit_logreg(from_points({{0}, {0}, {1}, {1}}, {0, 1, 1, 1}), IndexSet{0, 1, 2, 3},
               std::vector<double>{1, 1, 1, 1}, bad, 0);
  });
  EXPECT_THROW(LogisticRegression(LogRegConfig{-1.0, 10, 0, 0}), Error);
}

TEST(LogReg, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> weight(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset d = random_points(rng, 40, 3);
    std::vector<double> w(d.size());
    for (double& v : w) v = weight(rng);
    const WeightedLogLoss loss(d, d.all_indices(), w, trial % 2 ? 0.3 : 0.0);
    std::vector<double> p(loss.dimension());
    for (double& v : p) v = normal(rng);
    std::vector<double> grad(p.size());
    loss.value_and_gradient(p, grad);
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double h = 1e-6;
      std::vector<double> up = p, down = p;
      up[j] += h;
      down[j] -= h;
      const double numeric = (loss.value(up) - loss.value(down)) / (2 * h);
      EXPECT_LE(std::abs(numeric - grad[j]), 1e-5 * std::max(1.0, std::abs(grad[j])))
          << "component " << j;
    }
  }
}

TEST(LogReg, UnitWeightsMatchUnweightedAndDeterminism) {
  std::mt19937_64 rng(4);
  const Dataset d = random_points(rng, 60, 2);
  const LogisticRegression learner;
  const ModelPtr a = learner.fit_unweighted(d, d.all_indices(), 1);
  const ModelPtr b = learner.fit(d, d.all_indices(), std::vector<double>(d.size(), 1.0), 1, nullptr);
  EXPECT_EQ(a->to_json(), b->to_json());
  EXPECT_EQ(a->predict_all(d), b->predict_all(d));
}

TEST(LogReg, IgnoresWeightsOutsideTrain) {
  std::mt19937_64 rng(6);
  const Dataset d = random_points(rng, 30, 2);
  IndexSet train;
  for (std::size_t i = 0; i < 20; ++i) train.push_back(i);
  std::vector<double> w1(d.size(), 1.0), w2(d.size(), 1.0);
  for (std::size_t i = 20; i < 30; ++i) w2[i] = 1000.0;
  const LogisticRegression learner;
  EXPECT_EQ(learner.fit(d, train, w1, 0, nullptr)->to_json(),
            learner.fit(d, train, w2, 0, nullptr)->to_json());
}

TEST(LogReg, JsonRoundTrip) {
  std::mt19937_64 rng(9);
  const Dataset d = random_points(rng, 50, 3);
  const ModelPtr m = LogisticRegression().fit_unweighted(d, d.all_indices(), 0);
  const ModelPtr back = model_from_json(m->to_json());
  EXPECT_EQ(m->predict_all(d), back->predict_all(d));
  EXPECT_EQ(back->kind(), "logreg");
}

TEST(Tree, PureDataGivesLeaf) {
  const Dataset d = from_points({{0}, {1}, {2}}, {1, 1, 1});
  const auto t = fit_tree(d, d.all_indices(), std::vector<double>(3, 1.0), {}, 0);
  EXPECT_EQ(t->depth(), 0);
  EXPECT_EQ(t->predict(std::vector<double>{5.0}), 1);
}

TEST(Tree, Xor) {
  const Dataset d = from_points({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
  TreeConfig config;
  config.max_depth = 2;
  const auto t = fit_tree(d, d.all_indices(), std::vector<double>(4, 1.0), config, 0);
  EXPECT_EQ(accuracy(d, d.all_indices(), *t), 1.0);
  EXPECT_LE(t->depth(), 2);
}

TEST(Tree, DoublingWeightsKeepsTree) {
  std::mt19937_64 rng(12);
  const Dataset d = random_points(rng, 60, 3);
  std::uniform_int_distribution<int> wdist(1, 4);
  std::vector<double> w(d.size()), w2(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    w[i] = wdist(rng);
    w2[i] = 2 * w[i];
  }
  TreeConfig config;
  config.min_leaf_weight = 1.0;
  const auto a = fit_tree(d, d.all_indices(), w, config, 0);
  const auto b = fit_tree(d, d.all_indices(), w2, config, 0);
  EXPECT_EQ(a->to_json(), b->to_json());
}

TEST(Tree, DepthBoundAndJson) {
  std::mt19937_64 rng(13);
  const Dataset d = random_points(rng, 200, 3);
  for (int depth : {1, 2, 3, 5}) {
    TreeConfig config;
    config.max_depth = depth;
    const ModelPtr m = DecisionTree(config).fit_unweighted(d, d.all_indices(), 0);
    EXPECT_LE(dynamic_cast<const TreeModel&>(*m).depth(), depth);
    EXPECT_EQ(model_from_json(m->to_json())->predict_all(d), m->predict_all(d));
  }
  expect_code(ErrorCode::EmptyTrainingSet,
              [&] { fit_tree(d, IndexSet{}, std::vector<double>(d.size(), 1.0), {}, 0); });
}

TEST(LearnersProperty, ReplicationEquivalence) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> wdist(0, 3);
  const LogisticRegression logreg;
  const DecisionTree tree;
  for (int trial = 0; trial < 25; ++trial) {
    const Dataset d = random_points(rng, 8 + rng() % 25, 2);
    std::vector<double> w(d.size());
    for (double& v : w) v = wdist(rng);
    w[0] = std::max(w[0], 1.0);
    w[1] = std::max(w[1], 1.0);
    const Dataset rep = replicate(d, w);
    for (const WeightedLearner* learner : {static_cast<const WeightedLearner*>(&logreg),
                                           static_cast<const WeightedLearner*>(&tree)}) {
      const ModelPtr weighted = learner->fit(d, d.all_indices(), w, 0, nullptr);
      const ModelPtr replicated = learner->fit_unweighted(rep, rep.all_indices(), 0);
      EXPECT_EQ(weighted->predict_all(d), replicated->predict_all(d))
          << learner->kind() << " trial " << trial;
    }
  }
}
