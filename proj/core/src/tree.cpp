#include <algorithm>
#include <cmath>

#include "fairweight/error.hpp"
#include "fairweight/learners.hpp"

namespace fairweight {
namespace {

struct Item {
  std::size_t index;
  double weight;
  int label;
};

// Weighted Gini impurity times node weight: W - (W0^2 + W1^2) / W.
double impurity(double w0, double w1) {
  const double total = w0 + w1;
  return total > 0.0 ? total - (w0 * w0 + w1 * w1) / total : 0.0;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& dataset, const TreeConfig& config)
      : dataset_(dataset), config_(config) {}

  std::vector<TreeModel::Node> build(std::vector<Item> items) {
    grow(std::move(items), 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  int grow(std::vector<Item> items, int depth) {
    double w0 = 0.0;
    double w1 = 0.0;
    for (const Item& it : items) (it.label ? w1 : w0) += it.weight;

    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].prediction = w1 >= w0 ? 1 : 0;
    if (depth >= config_.max_depth || w0 == 0.0 || w1 == 0.0) return id;

    const Split best = find_split(items, w0, w1);
    if (best.feature < 0) return id;

    std::vector<Item> left;
    std::vector<Item> right;
    for (const Item& it : items) {
      (dataset_.features(it.index)[best.feature] <= best.threshold ? left : right).push_back(it);
    }
    items.clear();
    items.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    nodes_[id].feature = best.feature;
    nodes_[id].threshold = best.threshold;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  // Zero-gain splits are accepted: XOR-like labels need one to make progress.
  Split find_split(std::vector<Item>& items, double w0, double w1) const {
    const double parent = impurity(w0, w1);
    Split best;
    bool found = false;
    for (std::size_t f = 0; f < dataset_.feature_count(); ++f) {
      std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
        const double xa = dataset_.features(a.index)[f];
        const double xb = dataset_.features(b.index)[f];
        return xa != xb ? xa < xb : a.index < b.index;
      });
      double l0 = 0.0;
      double l1 = 0.0;
      for (std::size_t k = 0; k + 1 < items.size(); ++k) {
        (items[k].label ? l1 : l0) += items[k].weight;
        const double x = dataset_.features(items[k].index)[f];
        const double next = dataset_.features(items[k + 1].index)[f];
        if (x == next) continue;
        const double left_weight = l0 + l1;
        const double right_weight = (w0 + w1) - left_weight;
        if (left_weight < config_.min_leaf_weight || right_weight < config_.min_leaf_weight) {
          continue;
        }
        const double gain = parent - impurity(l0, l1) - impurity(w0 - l0, w1 - l1);
        if (!found || gain > best.gain) {
          best = {static_cast<int>(f), x + (next - x) / 2.0, gain};
          found = true;
        }
      }
    }
    return best;
  }

  const Dataset& dataset_;
  const TreeConfig& config_;
  std::vector<TreeModel::Node> nodes_;
};

}  // namespace

void TreeConfig::validate() const {
  if (max_depth < 0 || !(min_leaf_weight > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid tree config");
  }
}

TreeModel::TreeModel(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::InvalidArgument, "tree has no nodes");
  for (const Node& n : nodes_) {
    if (!n.is_leaf() && (n.left < 0 || n.right < 0 || n.left >= static_cast<int>(nodes_.size()) ||
                         n.right >= static_cast<int>(nodes_.size()))) {
      throw Error(ErrorCode::InvalidArgument, "tree node has a dangling child");
    }
  }
}

int TreeModel::predict(std::span<const double> features) const {
  int id = 0;
  while (!nodes_[id].is_leaf()) {
    const Node& n = nodes_[id];
    if (static_cast<std::size_t>(n.feature) >= features.size()) {
      throw Error(ErrorCode::InvalidArgument, "feature count does not match tree");
    }
    id = features[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes_[id].prediction;
}

int TreeModel::depth() const {
  // Children always follow their parent in the node array.
  std::vector<int> level(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    deepest = std::max(deepest, level[id]);
    if (!nodes_[id].is_leaf()) {
      level[nodes_[id].left] = level[id] + 1;
      level[nodes_[id].right] = level[id] + 1;
    }
  }
  return deepest;
}

nlohmann::json TreeModel::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : nodes_) {
    if (n.is_leaf()) {
      nodes.push_back({{"prediction", n.prediction}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"prediction", n.prediction}});
    }
  }
  return {{"kind", kind()}, {"nodes", std::move(nodes)}};
}

std::shared_ptr<const TreeModel> fit_tree(const Dataset& dataset, std::span<const std::size_t> train,
                                          std::span<const double> weights, const TreeConfig& config,
                                          std::uint64_t /*seed*/) {
  config.validate();
  if (weights.size() != dataset.size()) {
    throw Error(ErrorCode::InvalidArgument, "weight vector length does not match dataset");
  }
  if (train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "empty training set");
  std::vector<Item> items;
  items.reserve(train.size());
  for (std::size_t i : train) {
    if (i >= dataset.size()) throw Error(ErrorCode::InvalidArgument, "train index out of range");
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "weight of example " + std::to_string(i) + " is negative or non-finite");
    }
    if (w > 0.0) items.push_back({i, w, dataset.label(i)});
  }
  if (items.empty()) throw Error(ErrorCode::InvalidArgument, "all training weights are zero");
  TreeBuilder builder(dataset, config);
  return std::make_shared<const TreeModel>(builder.build(std::move(items)));
}

ModelPtr DecisionTree::fit(const Dataset& dataset, std::span<const std::size_t> train,
                           std::span<const double> weights, std::uint64_t seed,
                           const TrainedModel* /*warm_start*/) const {
  return fit_tree(dataset, train, weights, config_, seed);
}

ModelPtr model_from_json(const nlohmann::json& document) {
  try {
    const std::string kind = document.at("kind").get<std::string>();
    if (kind == "logreg") {
      return std::make_shared<const LogisticModel>(
          document.at("coefficients").get<std::vector<double>>(),
          document.at("intercept").get<double>(),
          document.at("feature_mean").get<std::vector<double>>(),
          document.at("feature_scale").get<std::vector<double>>(),
          document.value("epochs_run", 0));
    }
    if (kind == "tree") {
      std::vector<TreeModel::Node> nodes;
      for (const auto& n : document.at("nodes")) {
        TreeModel::Node node;
        node.prediction = n.at("prediction").get<int>();
        if (n.contains("feature")) {
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
        }
        nodes.push_back(node);
      }
      return std::make_shared<const TreeModel>(std::move(nodes));
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed model document: ") + e.what());
  }
}

}  // namespace fairweight
