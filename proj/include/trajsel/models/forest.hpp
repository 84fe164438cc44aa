#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trajsel/models/matrix.hpp"
#include "trajsel/models/tree.hpp"

namespace trajsel::models {

enum class ForestKind { RFClassifier, RFRegressor, RotationForest, TimeSeriesForest };

std::string_view to_string(ForestKind kind);

/// One block of a rotation forest transform: a k x k orthonormal matrix
/// (row-major, rows are principal axes) acting on the listed features.
struct RotationBlock {
  std::vector<int> features;
  std::vector<double> axes;
};

/// Series interval [start, start + length).
struct Interval {
  int start = 0;
  int length = 0;
};

struct ForestOptions {
  unsigned jobs = 1;
  int rotation_group_size = 3;
  double rotation_sample_fraction = 0.75;
};

/// A trained ensemble. Immutable after training, safe for concurrent prediction.
class ForestModel {
 public:
  ForestKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  bool has_transform() const { return !rotations_.empty() || !intervals_.empty(); }
  const std::vector<std::vector<RotationBlock>>& rotations() const { return rotations_; }
  const std::vector<std::vector<Interval>>& intervals() const { return intervals_; }

  /// Classification: majority vote over trees, ties to the lowest class index.
  int predict_class(std::span<const double> x) const;
  /// Regression: mean of tree outputs.
  double predict_value(std::span<const double> x) const;
  std::vector<int> predict_classes(const Matrix& x) const;
  std::vector<double> predict_values(const Matrix& x) const;

  /// Mean of per-tree normalized impurity importances (RF kinds only).
  std::vector<double> feature_importances() const;

  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);

 private:
  friend ForestModel train_rf_classifier(const Matrix&, std::span<const int>, int, std::uint64_t,
                                         const ForestOptions&);
  friend ForestModel train_rf_regressor(const Matrix&, std::span<const double>, int, std::uint64_t,
                                        const ForestOptions&);
  friend ForestModel train_rotation_forest(const Matrix&, std::span<const int>, int, std::uint64_t,
                                           const ForestOptions&);
  friend ForestModel train_tsf_regressor(const Matrix&, std::span<const double>, int, std::uint64_t,
                                         const ForestOptions&);

  std::vector<double> tree_input(std::size_t tree, std::span<const double> x) const;

  ForestKind kind_ = ForestKind::RFClassifier;
  std::uint64_t seed_ = 0;
  std::size_t n_features_ = 0;
  int n_classes_ = 0;
  std::vector<DecisionTree> trees_;
  std::vector<double> col_mean_;   // rotation forest standardization
  std::vector<double> col_scale_;
  std::vector<std::vector<RotationBlock>> rotations_;
  std::vector<std::vector<Interval>> intervals_;
};

/// Bagged Gini trees, ceil(sqrt(p)) candidates per split, leaf size 1.
ForestModel train_rf_classifier(const Matrix& x, std::span<const int> y, int n_trees, std::uint64_t seed,
                                const ForestOptions& options = {});
/// Bagged variance-reduction trees, ceil(p/3) candidates per split, leaf size 5.
ForestModel train_rf_regressor(const Matrix& x, std::span<const double> y, int n_trees, std::uint64_t seed,
                               const ForestOptions& options = {});
/// Rotation forest over equal-length rows (width >= 4).
ForestModel train_rotation_forest(const Matrix& x, std::span<const int> y, int n_trees, std::uint64_t seed,
                                  const ForestOptions& options = {});
/// Time series forest regressor on interval (mean, std, slope) features.
ForestModel train_tsf_regressor(const Matrix& x, std::span<const double> y, int n_trees, std::uint64_t seed,
                                const ForestOptions& options = {});

/// Per-tree bootstrap row indices (n draws with replacement each). With
/// >= 50 trees every row is drawn at least once; a miss redraws the whole set.
std::vector<std::vector<std::size_t>> bootstrap_bags(std::size_t n, int n_trees, std::uint64_t seed);

/// Orthonormal principal axes of the covariance of `data` (rows = samples),
/// by power iteration with deflation; degenerate directions are completed by
/// Gram-Schmidt. Returns k x k row-major, rows sorted by decreasing variance.
std::vector<double> principal_axes(const Matrix& data);

/// (mean, population std, least-squares slope) of series[start, start+length).
std::array<double, 3> interval_summary(std::span<const double> series, Interval interval);

}  // namespace trajsel::models
