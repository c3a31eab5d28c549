#include "adlens/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>

#include "json.hpp"

namespace adlens::ml {

namespace {

double gini(size_t pos, size_t n) {
  if (n == 0) return 0.0;
  double p = static_cast<double>(pos) / static_cast<double>(n);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

struct TreeBuilder {
  const Matrix& x;
  const std::vector<int>& y;
  const ForestParams& params;
  int mtry;
  Rng rng;
  std::vector<TreeNode> nodes;

  TreeBuilder(const Matrix& x_, const std::vector<int>& y_, const ForestParams& p, uint64_t seed)
      : x(x_), y(y_), params(p), rng(seed) {
    mtry = p.features_per_split > 0
               ? p.features_per_split
               : std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(x.cols)))));
    mtry = std::min(mtry, static_cast<int>(x.cols));
  }

  int build(std::vector<size_t>& samples, int depth) {
    size_t n = samples.size();
    size_t pos = 0;
    for (size_t i : samples) pos += static_cast<size_t>(y[i]);

    auto make_leaf = [&] {
      TreeNode leaf;
      leaf.prob = n == 0 ? 0.5 : static_cast<double>(pos) / static_cast<double>(n);
      nodes.push_back(leaf);
      return static_cast<int>(nodes.size() - 1);
    };

    if (depth >= params.max_depth || n < static_cast<size_t>(params.min_samples_split) ||
        pos == 0 || pos == n) {
      return make_leaf();
    }

    double parent_impurity = gini(pos, n);
    double best_gain = 0;
    int best_feature = -1;
    double best_threshold = 0;

    std::vector<std::pair<double, int>> column(n);
    for (size_t pick : rng.sample_without_replacement(x.cols, static_cast<size_t>(mtry))) {
      auto f = static_cast<size_t>(pick);
      for (size_t i = 0; i < n; ++i) {
        column[i] = {x.at(samples[i], f), y[samples[i]]};
      }
      std::sort(column.begin(), column.end());
      size_t left_pos = 0;
      for (size_t i = 1; i < n; ++i) {
        left_pos += static_cast<size_t>(column[i - 1].second);
        if (column[i].first == column[i - 1].first) continue;
        double left_imp = gini(left_pos, i);
        double right_imp = gini(pos - left_pos, n - i);
        double gain = parent_impurity -
                      (static_cast<double>(i) * left_imp +
                       static_cast<double>(n - i) * right_imp) /
                          static_cast<double>(n);
        if (gain > best_gain + 1e-15) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (column[i - 1].first + column[i].first);
        }
      }
    }

    if (best_feature < 0) return make_leaf();

    std::vector<size_t> left, right;
    for (size_t i : samples) {
      (x.at(i, static_cast<size_t>(best_feature)) <= best_threshold ? left : right).push_back(i);
    }
    if (left.empty() || right.empty()) return make_leaf();

    samples.clear();
    samples.shrink_to_fit();

    int node_index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[static_cast<size_t>(node_index)].feature = best_feature;
    nodes[static_cast<size_t>(node_index)].threshold = best_threshold;
    int left_index = build(left, depth + 1);
    int right_index = build(right, depth + 1);
    nodes[static_cast<size_t>(node_index)].left = left_index;
    nodes[static_cast<size_t>(node_index)].right = right_index;
    return node_index;
  }
};

DecisionTree build_tree(const Matrix& x, const std::vector<int>& y, const ForestParams& params,
                        uint64_t tree_seed) {
  TreeBuilder builder(x, y, params, tree_seed);
  std::vector<size_t> samples;
  samples.reserve(x.rows);
  if (params.bootstrap) {
    for (size_t i = 0; i < x.rows; ++i) {
      samples.push_back(static_cast<size_t>(builder.rng.below(x.rows)));
    }
  } else {
    for (size_t i = 0; i < x.rows; ++i) samples.push_back(i);
  }
  builder.build(samples, 0);
  return DecisionTree{std::move(builder.nodes)};
}

}  // namespace

double DecisionTree::predict(std::span<const double> features) const {
  size_t idx = 0;
  while (!nodes[idx].is_leaf()) {
    const TreeNode& node = nodes[idx];
    idx = static_cast<size_t>(features[static_cast<size_t>(node.feature)] <= node.threshold
                                  ? node.left
                                  : node.right);
  }
  return nodes[idx].prob;
}

ForestModel train_forest(const Matrix& x, const std::vector<int>& y, const ForestParams& params) {
  if (x.rows == 0 || x.cols == 0) throw DataError("empty training matrix");
  if (x.rows != y.size()) throw DataError("feature/label row count mismatch");
  if (params.tree_count < 1) throw UsageError("tree_count must be >= 1");

  ForestModel model;
  model.params = params;
  model.feature_dim = x.cols;
  model.trees.resize(static_cast<size_t>(params.tree_count));

  unsigned workers = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::future<void>> tasks;
  std::atomic<size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&] {
      while (true) {
        size_t t = next.fetch_add(1);
        if (t >= model.trees.size()) break;
        uint64_t tree_seed = derive_seed(params.seed, "tree:" + std::to_string(t));
        model.trees[t] = build_tree(x, y, params, tree_seed);
      }
    }));
  }
  for (auto& task : tasks) task.get();
  return model;
}

double predict_forest(const ForestModel& model, std::span<const double> features) {
  if (features.size() != model.feature_dim) {
    throw DataError("feature dimension mismatch: expected " + std::to_string(model.feature_dim) +
                    ", got " + std::to_string(features.size()));
  }
  if (model.trees.empty()) throw DataError("forest has no trees");
  double sum = 0;
  for (const DecisionTree& tree : model.trees) sum += tree.predict(features);
  return sum / static_cast<double>(model.trees.size());
}

std::string ForestModel::to_json_string() const {
  nlohmann::json j;
  j["type"] = "forest";
  j["tree_count"] = params.tree_count;
  j["max_depth"] = params.max_depth;
  j["min_samples_split"] = params.min_samples_split;
  j["features_per_split"] = params.features_per_split;
  j["bootstrap"] = params.bootstrap;
  j["seed"] = params.seed;
  j["feature_dim"] = feature_dim;
  nlohmann::json trees_json = nlohmann::json::array();
  for (const DecisionTree& tree : trees) {
    nlohmann::json nodes_json = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
      nodes_json.push_back({n.feature, n.threshold, n.left, n.right, n.prob});
    }
    trees_json.push_back(std::move(nodes_json));
  }
  j["trees"] = std::move(trees_json);
  return j.dump();
}

ForestModel ForestModel::from_json_string(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || j.value("type", "") != "forest") {
    throw DataError("invalid forest model JSON");
  }
  ForestModel m;
  m.params.tree_count = j.at("tree_count").get<int>();
  m.params.max_depth = j.at("max_depth").get<int>();
  m.params.min_samples_split = j.at("min_samples_split").get<int>();
  m.params.features_per_split = j.at("features_per_split").get<int>();
  m.params.bootstrap = j.at("bootstrap").get<bool>();
  m.params.seed = j.at("seed").get<uint64_t>();
  m.feature_dim = j.at("feature_dim").get<size_t>();
  for (const auto& tree_json : j.at("trees")) {
    DecisionTree tree;
    for (const auto& n : tree_json) {
      TreeNode node;
      node.feature = n.at(0).get<int>();
      node.threshold = n.at(1).get<double>();
      node.left = n.at(2).get<int>();
      node.right = n.at(3).get<int>();
      node.prob = n.at(4).get<double>();
      tree.nodes.push_back(node);
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace adlens::ml
