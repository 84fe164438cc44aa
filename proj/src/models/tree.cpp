#include "trajsel/models/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "trajsel/common/errors.hpp"

namespace trajsel::models {

namespace {

// Presorted CART builder. Every feature keeps its own sample ordering; a node
// owns the same [begin, end) range in all orderings, and splitting stably
// partitions each ordering so children stay sorted.
class Builder {
 public:
  Builder(const Matrix& x, std::span<const std::size_t> samples, const TreeParams& params, Rng& rng)
      : m_(samples.size()), p_(x.cols()), params_(params), rng_(rng) {
    if (m_ == 0) throw DomainError("cannot fit a tree on zero samples");
    if (p_ == 0) throw DomainError("cannot fit a tree on zero features");
    values_.resize(p_ * m_);
    for (std::size_t f = 0; f < p_; ++f)
      for (std::size_t s = 0; s < m_; ++s) values_[f * m_ + s] = x(samples[s], f);
    order_.resize(p_ * m_);
    for (std::size_t f = 0; f < p_; ++f) {
      auto first = order_.begin() + static_cast<std::ptrdiff_t>(f * m_);
      std::iota(first, first + static_cast<std::ptrdiff_t>(m_), 0u);
      const double* v = &values_[f * m_];
      std::stable_sort(first, first + static_cast<std::ptrdiff_t>(m_),
                       [v](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
    }
    features_.resize(p_);
    std::iota(features_.begin(), features_.end(), 0u);
    goes_left_.resize(m_);
    buffer_.resize(m_);
    importances_.assign(p_, 0.0);
  }

  // Stats::scan returns (score, split position) for one feature's ordering.
  struct Fitted {
    std::vector<TreeNode> nodes;
    std::vector<double> importances;
  };

  template <typename Stats>
  Fitted build(Stats& stats) {
    struct Task {
      int node;
      std::size_t begin, end;
      int depth;
    };
    std::vector<TreeNode> nodes(1);
    std::vector<Task> stack{{0, 0, m_, 0}};
    while (!stack.empty()) {
      const Task t = stack.back();
      stack.pop_back();
      const std::uint32_t* rows = &order_[t.begin];
      const std::size_t n = t.end - t.begin;
      nodes[t.node].value = stats.leaf_value(rows, n);

      const bool depth_capped = params_.max_depth > 0 && t.depth >= params_.max_depth;
      if (depth_capped || n < 2 * static_cast<std::size_t>(params_.min_leaf) || stats.pure(rows, n)) continue;

      const double parent = stats.parent_score(rows, n);
      rng_.shuffle(features_.begin(), features_.end());
      const std::size_t wanted = params_.max_features > 0 ? static_cast<std::size_t>(params_.max_features) : p_;
      std::size_t evaluated = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      std::size_t best_feature = p_;
      double best_threshold = 0.0;
      for (std::size_t fi = 0; fi < p_ && evaluated < wanted; ++fi) {
        const std::size_t f = features_[fi];
        const std::uint32_t* ord = &order_[f * m_ + t.begin];
        const double* v = &values_[f * m_];
        if (v[ord[0]] == v[ord[n - 1]]) continue;  // constant in this node
        ++evaluated;
        auto [score, k] = stats.scan(ord, v, n, params_.min_leaf);
        if (k < n && score > best_score) {
          best_score = score;
          best_feature = f;
          const double lo = v[ord[k]];
          const double hi = v[ord[k + 1]];
          double mid = 0.5 * lo + 0.5 * hi;
          if (!(mid >= lo && mid < hi)) mid = lo;
          best_threshold = mid;
        }
      }
      if (best_feature == p_) continue;

      importances_[best_feature] += std::max(0.0, best_score - parent);
      const double* bv = &values_[best_feature * m_];
      for (std::size_t k = t.begin; k < t.end; ++k) {
        const std::uint32_t s = order_[best_feature * m_ + k];
        goes_left_[s] = bv[s] <= best_threshold;
      }
      std::size_t n_left = 0;
      for (std::size_t f = 0; f < p_; ++f) {
        std::uint32_t* ord = &order_[f * m_];
        std::size_t l = 0, r = 0;
        for (std::size_t k = t.begin; k < t.end; ++k) {
          const std::uint32_t s = ord[k];
          if (goes_left_[s]) ord[t.begin + l++] = s;
          else buffer_[r++] = s;
        }
        std::copy(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(r), ord + t.begin + l);
        n_left = l;
      }
      const int left = static_cast<int>(nodes.size());
      nodes.emplace_back();
      nodes.emplace_back();
      nodes[t.node].feature = static_cast<int>(best_feature);
      nodes[t.node].threshold = best_threshold;
      nodes[t.node].left = left;
      nodes[t.node].right = left + 1;
      stack.push_back({left + 1, t.begin + n_left, t.end, t.depth + 1});
      stack.push_back({left, t.begin, t.begin + n_left, t.depth + 1});
    }
    const double total = std::accumulate(importances_.begin(), importances_.end(), 0.0);
    if (total > 0.0)
      for (auto& v : importances_) v /= total;
    return {std::move(nodes), std::move(importances_)};
  }

 private:
  std::size_t m_, p_;
  TreeParams params_;
  Rng& rng_;
  std::vector<double> values_;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> features_;
  std::vector<char> goes_left_;
  std::vector<std::uint32_t> buffer_;
  std::vector<double> importances_;
};

// Maximizes sum_c left_c^2 / n_left + sum_c right_c^2 / n_right (Gini gain).
struct ClassStats {
  std::span<const int> y;
  std::span<const std::size_t> samples;
  int n_classes;
  std::vector<double> left, right;

  int label(std::uint32_t s) const { return y[samples[s]]; }

  std::vector<double> counts(const std::uint32_t* rows, std::size_t n) const {
    std::vector<double> c(n_classes, 0.0);
    for (std::size_t i = 0; i < n; ++i) c[label(rows[i])] += 1.0;
    return c;
  }
  std::vector<double> leaf_value(const std::uint32_t* rows, std::size_t n) const {
    auto c = counts(rows, n);
    for (auto& v : c) v /= static_cast<double>(n);
    return c;
  }
  bool pure(const std::uint32_t* rows, std::size_t n) const {
    for (std::size_t i = 1; i < n; ++i)
      if (label(rows[i]) != label(rows[0])) return false;
    return true;
  }
  double parent_score(const std::uint32_t* rows, std::size_t n) const {
    double sq = 0.0;
    for (double c : counts(rows, n)) sq += c * c;
    return sq / static_cast<double>(n);
  }
  std::pair<double, std::size_t> scan(const std::uint32_t* ord, const double* v, std::size_t n, int min_leaf) {
    right = counts(ord, n);
    left.assign(n_classes, 0.0);
    double sl = 0.0, sr = 0.0;
    for (double c : right) sr += c * c;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_k = n;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const int c = label(ord[k]);
      sl += 2.0 * left[c] + 1.0;
      left[c] += 1.0;
      sr -= 2.0 * right[c] - 1.0;
      right[c] -= 1.0;
      const std::size_t nl = k + 1, nr = n - nl;
      if (nl < static_cast<std::size_t>(min_leaf)) continue;
      if (nr < static_cast<std::size_t>(min_leaf)) break;
      if (v[ord[k]] == v[ord[k + 1]]) continue;
      const double score = sl / static_cast<double>(nl) + sr / static_cast<double>(nr);
      if (score > best) {
        best = score;
        best_k = k;
      }
    }
    return {best, best_k};
  }
};

// Maximizes S_left^2 / n_left + S_right^2 / n_right (variance reduction).
struct RegressionStats {
  std::span<const double> y;
  std::span<const std::size_t> samples;

  double target(std::uint32_t s) const { return y[samples[s]]; }

  std::vector<double> leaf_value(const std::uint32_t* rows, std::size_t n) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += target(rows[i]);
    return {s / static_cast<double>(n)};
  }
  bool pure(const std::uint32_t* rows, std::size_t n) const {
    for (std::size_t i = 1; i < n; ++i)
      if (target(rows[i]) != target(rows[0])) return false;
    return true;
  }
  double parent_score(const std::uint32_t* rows, std::size_t n) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += target(rows[i]);
    return s * s / static_cast<double>(n);
  }
  std::pair<double, std::size_t> scan(const std::uint32_t* ord, const double* v, std::size_t n, int min_leaf) const {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += target(ord[i]);
    double sl = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_k = n;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      sl += target(ord[k]);
      const std::size_t nl = k + 1, nr = n - nl;
      if (nl < static_cast<std::size_t>(min_leaf)) continue;
      if (nr < static_cast<std::size_t>(min_leaf)) break;
      if (v[ord[k]] == v[ord[k + 1]]) continue;
      const double sr = total - sl;
      const double score = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr);
      if (score > best) {
        best = score;
        best_k = k;
      }
    }
    return {best, best_k};
  }
};

}  // namespace

DecisionTree DecisionTree::fit_classifier(const Matrix& x, std::span<const int> y, int n_classes,
                                          std::span<const std::size_t> samples, const TreeParams& params,
                                          Rng& rng) {
  if (y.size() != x.rows()) throw DomainError("label count does not match rows");
  for (std::size_t s : samples)
    if (y[s] < 0 || y[s] >= n_classes) throw DomainError("class label out of range");
  Builder builder(x, samples, params, rng);
  ClassStats stats{y, samples, n_classes, {}, {}};
  auto fitted = builder.build(stats);
  DecisionTree tree;
  tree.nodes_ = std::move(fitted.nodes);
  tree.importances_ = std::move(fitted.importances);
  return tree;
}

DecisionTree DecisionTree::fit_regressor(const Matrix& x, std::span<const double> y,
                                         std::span<const std::size_t> samples, const TreeParams& params,
                                         Rng& rng) {
  if (y.size() != x.rows()) throw DomainError("target count does not match rows");
  Builder builder(x, samples, params, rng);
  RegressionStats stats{y, samples};
  auto fitted = builder.build(stats);
  DecisionTree tree;
  tree.nodes_ = std::move(fitted.nodes);
  tree.importances_ = std::move(fitted.importances);
  return tree;
}

const std::vector<double>& DecisionTree::leaf_value(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& node = nodes_[i];
    i = static_cast<std::size_t>(x[node.feature] <= node.threshold ? node.left : node.right);
  }
  return nodes_[i].value;
}

int DecisionTree::predict_class(std::span<const double> x) const {
  const auto& dist = leaf_value(x);
  return static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
}

double DecisionTree::predict_value(std::span<const double> x) const { return leaf_value(x).front(); }

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes_[i].feature >= 0) {
      d[nodes_[i].left] = d[i] + 1;
      d[nodes_[i].right] = d[i] + 1;
    }
  }
  return best;
}

nlohmann::json DecisionTree::to_json() const {
  nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                 left = nlohmann::json::array(), right = nlohmann::json::array(), value = nlohmann::json::array();
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value},
          {"importances", importances_}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j, std::size_t n_features) {
  DecisionTree t;
  const auto& feature = j.at("feature");
  const std::size_t count = feature.size();
  t.nodes_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto& n = t.nodes_[i];
    n.feature = feature.at(i).get<int>();
    n.threshold = j.at("threshold").at(i).get<double>();
    n.left = j.at("left").at(i).get<int>();
    n.right = j.at("right").at(i).get<int>();
    n.value = j.at("value").at(i).get<std::vector<double>>();
    const bool leaf = n.feature < 0;
    if (!leaf && (static_cast<std::size_t>(n.feature) >= n_features || n.left <= static_cast<int>(i) ||
                  n.right <= static_cast<int>(i) || static_cast<std::size_t>(n.right) >= count))
      throw ConsistencyError("invalid tree node in model document");
    if (leaf && n.value.empty()) throw ConsistencyError("leaf without prediction in model document");
  }
  t.importances_ = j.at("importances").get<std::vector<double>>();
  return t;
}

}  // namespace trajsel::models
