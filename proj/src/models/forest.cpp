#include "trajsel/models/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/parallel.hpp"
#include "trajsel/common/rng.hpp"

namespace trajsel::models {

namespace {

constexpr int kFormatVersion = 1;
constexpr int kPowerIterations = 100;
constexpr double kPowerTolerance = 1e-9;
constexpr int kMaxBaggingAttempts = 8;

void check_common(const Matrix& x, std::size_t n_targets, int n_trees) {
  if (n_trees < 1) throw DomainError("a forest needs at least one tree");
  if (x.rows() == 0) throw DomainError("empty training set");
  if (x.cols() == 0) throw DomainError("training rows have no features");
  if (n_targets != x.rows()) throw DomainError("target count does not match rows");
}

int class_count(std::span<const int> y) {
  std::set<int> distinct(y.begin(), y.end());
  if (*distinct.begin() < 0) throw DomainError("class labels must be non-negative");
  if (distinct.size() < 2) throw DomainError("classification needs at least two classes");
  return *distinct.rbegin() + 1;
}

std::uint64_t tree_seed(std::uint64_t seed, std::size_t tree, int attempt) {
  return derive_seed(seed, "tree", {static_cast<std::uint64_t>(tree), static_cast<std::uint64_t>(attempt)});
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

int ceil_sqrt(std::size_t p) { return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p)))); }

void orthogonalize(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
  for (const auto& b : basis) {
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += v[i] * b[i];
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= dot * b[i];
  }
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<std::vector<std::size_t>> bootstrap_bags(std::size_t n, int n_trees, std::uint64_t seed) {
  for (int attempt = 0; attempt < kMaxBaggingAttempts; ++attempt) {
    std::vector<std::vector<std::size_t>> bags(n_trees, std::vector<std::size_t>(n));
    std::vector<char> seen(n, 0);
    for (int t = 0; t < n_trees; ++t) {
      Rng rng(derive_seed(seed, "bag", {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(attempt)}));
      for (auto& s : bags[t]) {
        s = rng.below(n);
        seen[s] = 1;
      }
    }
    const bool covered = std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    if (n_trees < 50 || covered) return bags;
  }
  throw DomainError("bootstrap failed to cover the training rows");
}

std::string_view to_string(ForestKind kind) {
  switch (kind) {
    case ForestKind::RFClassifier: return "RFClassifier";
    case ForestKind::RFRegressor: return "RFRegressor";
    case ForestKind::RotationForest: return "RotationForest";
    case ForestKind::TimeSeriesForest: return "TimeSeriesForest";
  }
  return "?";
}

std::vector<double> principal_axes(const Matrix& data) {
  const std::size_t k = data.cols();
  const std::size_t n = data.rows();
  std::vector<double> mean(k, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < k; ++c) mean[c] += data(r, c);
  for (auto& m : mean) m /= std::max<std::size_t>(n, 1);
  std::vector<double> cov(k * k, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) cov[a * k + b] += (data(r, a) - mean[a]) * (data(r, b) - mean[b]);
  double trace = 0.0;
  for (std::size_t a = 0; a < k; ++a) trace += cov[a * k + a];

  std::vector<std::vector<double>> axes;
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<double> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
    orthogonalize(v, axes);
    double nv = norm(v);
    if (nv < 1e-12) break;
    for (auto& x : v) x /= nv;
    bool degenerate = false;
    for (int it = 0; it < kPowerIterations; ++it) {
      std::vector<double> w(k, 0.0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) w[i] += cov[i * k + j] * v[j];
      orthogonalize(w, axes);
      const double nw = norm(w);
      if (!(nw > 1e-300)) {
        degenerate = true;
        break;
      }
      double diff = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        w[i] /= nw;
        diff += (w[i] - v[i]) * (w[i] - v[i]);
      }
      v = std::move(w);
      if (std::sqrt(diff) < kPowerTolerance) break;
    }
    double lambda = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) lambda += v[i] * cov[i * k + j] * v[j];
    if (degenerate || !(lambda > 1e-12 * trace) || !(lambda > 0.0)) break;
    // Sign convention: largest-magnitude component positive.
    const auto big = std::max_element(v.begin(), v.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    if (*big < 0.0)
      for (auto& x : v) x = -x;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) cov[i * k + j] -= lambda * v[i] * v[j];
    axes.push_back(std::move(v));
  }
  for (std::size_t e = 0; e < k && axes.size() < k; ++e) {
    std::vector<double> v(k, 0.0);
    v[e] = 1.0;
    orthogonalize(v, axes);
    orthogonalize(v, axes);
    const double nv = norm(v);
    if (nv < 1e-6) continue;
    for (auto& x : v) x /= nv;
    axes.push_back(std::move(v));
  }
  std::vector<double> out;
  out.reserve(k * k);
  for (const auto& a : axes) out.insert(out.end(), a.begin(), a.end());
  return out;
}

std::array<double, 3> interval_summary(std::span<const double> series, Interval iv) {
  const auto part = series.subspan(static_cast<std::size_t>(iv.start), static_cast<std::size_t>(iv.length));
  const double n = static_cast<double>(part.size());
  const double mean = std::accumulate(part.begin(), part.end(), 0.0) / n;
  double var = 0.0, sxy = 0.0, sxx = 0.0;
  const double tbar = 0.5 * (n - 1.0);
  for (std::size_t i = 0; i < part.size(); ++i) {
    const double dt = static_cast<double>(i) - tbar;
    var += (part[i] - mean) * (part[i] - mean);
    sxy += dt * (part[i] - mean);
    sxx += dt * dt;
  }
  return {mean, std::sqrt(var / n), sxx > 0.0 ? sxy / sxx : 0.0};
}

std::vector<double> ForestModel::tree_input(std::size_t t, std::span<const double> x) const {
  if (kind_ == ForestKind::RotationForest) {
    std::vector<double> z(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) z[c] = (x[c] - col_mean_[c]) / col_scale_[c];
    std::vector<double> out;
    out.reserve(x.size());
    for (const auto& block : rotations_[t]) {
      const std::size_t k = block.features.size();
      for (std::size_t a = 0; a < k; ++a) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += block.axes[a * k + j] * z[block.features[j]];
        out.push_back(s);
      }
    }
    return out;
  }
  std::vector<double> out;
  out.reserve(3 * intervals_[t].size());
  for (const auto& iv : intervals_[t]) {
    const auto s = interval_summary(x, iv);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

int ForestModel::predict_class(std::span<const double> x) const {
  if (kind_ != ForestKind::RFClassifier && kind_ != ForestKind::RotationForest)
    throw DomainError("predict_class on a regression forest");
  if (x.size() != n_features_) throw DomainError("input width does not match the model");
  std::vector<int> votes(n_classes_, 0);
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    if (has_transform()) {
      const auto in = tree_input(t, x);
      ++votes[trees_[t].predict_class(in)];
    } else {
      ++votes[trees_[t].predict_class(x)];
    }
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

double ForestModel::predict_value(std::span<const double> x) const {
  if (kind_ != ForestKind::RFRegressor && kind_ != ForestKind::TimeSeriesForest)
    throw DomainError("predict_value on a classification forest");
  if (x.size() != n_features_) throw DomainError("input width does not match the model");
  double s = 0.0;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    if (has_transform()) {
      const auto in = tree_input(t, x);
      s += trees_[t].predict_value(in);
    } else {
      s += trees_[t].predict_value(x);
    }
  }
  return s / static_cast<double>(trees_.size());
}

std::vector<int> ForestModel::predict_classes(const Matrix& x) const {
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_class(x.row(r));
  return out;
}

std::vector<double> ForestModel::predict_values(const Matrix& x) const {
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_value(x.row(r));
  return out;
}

std::vector<double> ForestModel::feature_importances() const {
  if (has_transform()) throw DomainError("importances are defined on raw features only");
  std::vector<double> imp(n_features_, 0.0);
  for (const auto& t : trees_)
    for (std::size_t f = 0; f < n_features_; ++f) imp[f] += t.importances()[f];
  for (auto& v : imp) v /= static_cast<double>(trees_.size());
  return imp;
}

ForestModel train_rf_classifier(const Matrix& x, std::span<const int> y, int n_trees, std::uint64_t seed,
                                const ForestOptions& options) {
  check_common(x, y.size(), n_trees);
  ForestModel model;
  model.kind_ = ForestKind::RFClassifier;
  model.seed_ = seed;
  model.n_features_ = x.cols();
  model.n_classes_ = class_count(y);
  const auto bags = bootstrap_bags(x.rows(), n_trees, seed);
  const TreeParams params{ceil_sqrt(x.cols()), 1, 0};
  model.trees_.resize(n_trees);
  parallel_for(static_cast<std::size_t>(n_trees), options.jobs, [&](std::size_t t) {
    Rng rng(tree_seed(seed, t, 0));
    model.trees_[t] = DecisionTree::fit_classifier(x, y, model.n_classes_, bags[t], params, rng);
  });
  return model;
}

ForestModel train_rf_regressor(const Matrix& x, std::span<const double> y, int n_trees, std::uint64_t seed,
                               const ForestOptions& options) {
  check_common(x, y.size(), n_trees);
  ForestModel model;
  model.kind_ = ForestKind::RFRegressor;
  model.seed_ = seed;
  model.n_features_ = x.cols();
  const auto bags = bootstrap_bags(x.rows(), n_trees, seed);
  const TreeParams params{std::max(1, static_cast<int>(std::ceil(x.cols() / 3.0))), 5, 0};
  model.trees_.resize(n_trees);
  parallel_for(static_cast<std::size_t>(n_trees), options.jobs, [&](std::size_t t) {
    Rng rng(tree_seed(seed, t, 0));
    model.trees_[t] = DecisionTree::fit_regressor(x, y, bags[t], params, rng);
  });
  return model;
}

ForestModel train_rotation_forest(const Matrix& x, std::span<const int> y, int n_trees, std::uint64_t seed,
                                  const ForestOptions& options) {
  check_common(x, y.size(), n_trees);
  if (x.rows() < 2) throw DomainError("rotation forest needs at least two rows");
  if (x.cols() < 4) throw DomainError("rotation forest needs rows of length >= 4");
  if (options.rotation_group_size < 1) throw DomainError("rotation group size must be >= 1");
  ForestModel model;
  model.kind_ = ForestKind::RotationForest;
  model.seed_ = seed;
  model.n_features_ = x.cols();
  model.n_classes_ = class_count(y);

  const std::size_t n = x.rows(), p = x.cols();
  model.col_mean_.assign(p, 0.0);
  model.col_scale_.assign(p, 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += x(r, c);
    const double mu = s / static_cast<double>(n);
    double v = 0.0;
    for (std::size_t r = 0; r < n; ++r) v += (x(r, c) - mu) * (x(r, c) - mu);
    const double sd = std::sqrt(v / static_cast<double>(n));
    model.col_mean_[c] = mu;
    model.col_scale_[c] = sd > 0.0 && std::isfinite(sd) ? sd : 1.0;
  }
  Matrix z(n, p);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c) z(r, c) = (x(r, c) - model.col_mean_[c]) / model.col_scale_[c];

  std::vector<std::vector<std::size_t>> rows_by_class(model.n_classes_);
  for (std::size_t r = 0; r < n; ++r) rows_by_class[y[r]].push_back(r);
  std::vector<int> present;
  for (int c = 0; c < model.n_classes_; ++c)
    if (!rows_by_class[c].empty()) present.push_back(c);

  model.trees_.resize(n_trees);
  model.rotations_.resize(n_trees);
  const auto everyone = all_rows(n);
  const std::size_t group = static_cast<std::size_t>(options.rotation_group_size);
  parallel_for(static_cast<std::size_t>(n_trees), options.jobs, [&](std::size_t t) {
    Rng rng(tree_seed(seed, t, 0));
    std::vector<int> features(p);
    std::iota(features.begin(), features.end(), 0);
    rng.shuffle(features.begin(), features.end());
    std::vector<RotationBlock> blocks;
    for (std::size_t start = 0; start < p; start += group) {
      RotationBlock block;
      block.features.assign(features.begin() + static_cast<std::ptrdiff_t>(start),
                            features.begin() + static_cast<std::ptrdiff_t>(std::min(p, start + group)));
      // Random non-empty class subset, then a subsample of its rows.
      std::vector<std::size_t> pool;
      for (int c : present)
        if (rng.uniform() < 0.5) pool.insert(pool.end(), rows_by_class[c].begin(), rows_by_class[c].end());
      if (pool.empty()) {
        const int c = present[rng.below(present.size())];
        pool = rows_by_class[c];
      }
      rng.shuffle(pool.begin(), pool.end());
      std::size_t keep = static_cast<std::size_t>(std::ceil(options.rotation_sample_fraction * pool.size()));
      keep = std::clamp<std::size_t>(keep, std::min<std::size_t>(2, pool.size()), pool.size());
      Matrix sub(keep, block.features.size());
      for (std::size_t i = 0; i < keep; ++i)
        for (std::size_t j = 0; j < block.features.size(); ++j) sub(i, j) = z(pool[i], block.features[j]);
      block.axes = principal_axes(sub);
      blocks.push_back(std::move(block));
    }
    model.rotations_[t] = std::move(blocks);

    Matrix rotated(n, p);
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t col = 0;
      for (const auto& block : model.rotations_[t]) {
        const std::size_t k = block.features.size();
        for (std::size_t a = 0; a < k; ++a, ++col) {
          double s = 0.0;
          for (std::size_t j = 0; j < k; ++j) s += block.axes[a * k + j] * z(r, block.features[j]);
          rotated(r, col) = s;
        }
      }
    }
    model.trees_[t] = DecisionTree::fit_classifier(rotated, y, model.n_classes_, everyone, TreeParams{0, 1, 0}, rng);
  });
  return model;
}

ForestModel train_tsf_regressor(const Matrix& x, std::span<const double> y, int n_trees, std::uint64_t seed,
                                const ForestOptions& options) {
  check_common(x, y.size(), n_trees);
  const std::size_t length = x.cols();
  if (length < 3) throw DomainError("time series forest needs series of length >= 3");
  ForestModel model;
  model.kind_ = ForestKind::TimeSeriesForest;
  model.seed_ = seed;
  model.n_features_ = length;
  const int n_intervals = ceil_sqrt(length);
  const auto everyone = all_rows(x.rows());
  model.trees_.resize(n_trees);
  model.intervals_.resize(n_trees);
  parallel_for(static_cast<std::size_t>(n_trees), options.jobs, [&](std::size_t t) {
    Rng rng(tree_seed(seed, t, 0));
    std::vector<Interval> ivs(n_intervals);
    for (auto& iv : ivs) {
      iv.length = 3 + static_cast<int>(rng.below(length - 2));
      iv.start = static_cast<int>(rng.below(length - static_cast<std::size_t>(iv.length) + 1));
    }
    Matrix derived(x.rows(), 3 * ivs.size());
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t i = 0; i < ivs.size(); ++i) {
        const auto s = interval_summary(x.row(r), ivs[i]);
        for (int k = 0; k < 3; ++k) derived(r, 3 * i + k) = s[k];
      }
    model.intervals_[t] = std::move(ivs);
    model.trees_[t] = DecisionTree::fit_regressor(derived, y, everyone, TreeParams{0, 5, 0}, rng);
  });
  return model;
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  nlohmann::json rotations = nlohmann::json::array();
  for (const auto& blocks : rotations_) {
    nlohmann::json jb = nlohmann::json::array();
    for (const auto& b : blocks) jb.push_back({{"features", b.features}, {"axes", b.axes}});
    rotations.push_back(jb);
  }
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& ivs : intervals_) {
    nlohmann::json ji = nlohmann::json::array();
    for (const auto& iv : ivs) ji.push_back({iv.start, iv.length});
    intervals.push_back(ji);
  }
  return {{"format", "trajsel-forest"},
          {"version", kFormatVersion},
          {"kind", to_string(kind_)},
          {"seed", seed_},
          {"n_features", n_features_},
          {"n_classes", n_classes_},
          {"col_mean", col_mean_},
          {"col_scale", col_scale_},
          {"rotations", rotations},
          {"intervals", intervals},
          {"trees", trees}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "trajsel-forest" || j.at("version").get<int>() != kFormatVersion)
      throw ConsistencyError("unsupported model document version");
    ForestModel m;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "RFClassifier") m.kind_ = ForestKind::RFClassifier;
    else if (kind == "RFRegressor") m.kind_ = ForestKind::RFRegressor;
    else if (kind == "RotationForest") m.kind_ = ForestKind::RotationForest;
    else if (kind == "TimeSeriesForest") m.kind_ = ForestKind::TimeSeriesForest;
    else throw ConsistencyError("unknown forest kind " + kind);
    m.seed_ = j.at("seed").get<std::uint64_t>();
    m.n_features_ = j.at("n_features").get<std::size_t>();
    m.n_classes_ = j.at("n_classes").get<int>();
    m.col_mean_ = j.at("col_mean").get<std::vector<double>>();
    m.col_scale_ = j.at("col_scale").get<std::vector<double>>();
    for (const auto& jb : j.at("rotations")) {
      std::vector<RotationBlock> blocks;
      for (const auto& b : jb) blocks.push_back({b.at("features").get<std::vector<int>>(), b.at("axes").get<std::vector<double>>()});
      m.rotations_.push_back(std::move(blocks));
    }
    for (const auto& ji : j.at("intervals")) {
      std::vector<Interval> ivs;
      for (const auto& iv : ji) ivs.push_back({iv.at(0).get<int>(), iv.at(1).get<int>()});
      m.intervals_.push_back(std::move(ivs));
    }
    const bool wants_rotation = m.kind_ == ForestKind::RotationForest;
    const bool wants_intervals = m.kind_ == ForestKind::TimeSeriesForest;
    const std::size_t n_trees = j.at("trees").size();
    if (n_trees < 1) throw ConsistencyError("model document has no trees");
    if ((wants_rotation ? n_trees : 0) != m.rotations_.size() || (wants_intervals ? n_trees : 0) != m.intervals_.size())
      throw ConsistencyError("per-tree transforms do not match the forest kind");
    for (std::size_t t = 0; t < n_trees; ++t) {
      std::size_t width = m.n_features_;
      if (wants_intervals) width = 3 * m.intervals_[t].size();
      m.trees_.push_back(DecisionTree::from_json(j.at("trees").at(t), width));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConsistencyError(std::string("malformed model document: ") + e.what());
  }
}

}  // namespace trajsel::models
