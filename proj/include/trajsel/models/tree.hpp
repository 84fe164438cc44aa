#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/models/matrix.hpp"

namespace trajsel::models {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> value;  // class distribution, or {mean} for regression
};

struct TreeParams {
  int max_features = 0;  // candidates per split; 0 = all
  int min_leaf = 1;
  int max_depth = 0;     // 0 = unlimited
};

/// CART tree: Gini splits for classification, variance reduction for
/// regression. Samples go left when x[feature] <= threshold.
class DecisionTree {
 public:
  /// `samples` lists training rows, duplicates allowed (bootstrap).
  static DecisionTree fit_classifier(const Matrix& x, std::span<const int> y, int n_classes,
                                     std::span<const std::size_t> samples, const TreeParams& params, Rng& rng);
  static DecisionTree fit_regressor(const Matrix& x, std::span<const double> y,
                                    std::span<const std::size_t> samples, const TreeParams& params, Rng& rng);

  const std::vector<double>& leaf_value(std::span<const double> x) const;
  /// Majority class of the leaf; ties go to the lowest class index.
  int predict_class(std::span<const double> x) const;
  double predict_value(std::span<const double> x) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  /// Impurity decrease per feature, normalized to sum 1 (all zero for a stump).
  const std::vector<double>& importances() const { return importances_; }
  int depth() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j, std::size_t n_features);

 private:
  std::vector<TreeNode> nodes_;
  std::vector<double> importances_;
};

}  // namespace trajsel::models
