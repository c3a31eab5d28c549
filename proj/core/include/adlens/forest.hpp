#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adlens/util.hpp"

namespace adlens::ml {

struct ForestParams {
  int tree_count = 100;
  int max_depth = 12;
  int min_samples_split = 2;
  // Features considered per split; 0 means sqrt(feature_dim).
  int features_per_split = 0;
  bool bootstrap = true;
  uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1;
  int right = -1;
  double prob = 0;  // leaf probability of the positive class

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> features) const;
};

struct ForestModel {
  ForestParams params;
  size_t feature_dim = 0;
  std::vector<DecisionTree> trees;

  std::string to_json_string() const;
  static ForestModel from_json_string(std::string_view text);
};

// Bagged Gini-split trees with per-split feature subsampling. Per-tree
// seeds derive from params.seed, so parallel construction cannot change
// the result.
ForestModel train_forest(const Matrix& x, const std::vector<int>& y, const ForestParams& params);

// Mean of per-tree leaf probabilities.
double predict_forest(const ForestModel& model, std::span<const double> features);

}  // namespace adlens::ml
