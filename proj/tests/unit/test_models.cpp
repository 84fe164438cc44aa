#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/models/forest.hpp"
#include "trajsel/models/metrics.hpp"
#include "trajsel/models/tree.hpp"

using namespace trajsel;
using namespace trajsel::models;

namespace {

struct ClassData {
  Matrix x;
  std::vector<int> y;
};

// Two clusters centred at 0 and 10 in every feature.
ClassData clusters(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  ClassData d{Matrix(rows, cols), std::vector<int>(rows)};
  for (std::size_t r = 0; r < rows; ++r) {
    d.y[r] = static_cast<int>(r % 2);
    for (std::size_t c = 0; c < cols; ++c) d.x(r, c) = 10.0 * d.y[r] + rng.uniform(-1.0, 1.0);
  }
  return d;
}

double sd(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

}  // namespace

TEST_CASE("metrics closed forms") {
  CHECK(accuracy(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3}) == 1.0);
  CHECK(accuracy(std::vector<int>{0, 0}, std::vector<int>{1, 1}) == 0.0);
  CHECK(accuracy(std::vector<int>{1, 0, 1, 1}, std::vector<int>{1, 0, 1, 0}) == 0.75);
  CHECK(rmse(std::vector<double>{1.5, 2}, std::vector<double>{1.5, 2}) == 0.0);
  CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), DomainError);
  auto m = Metrics::from_folds(false, {3.0, 1.0, 2.0, 10.0});
  CHECK(m.median == 2.5);
  CHECK(m.mean == 4.0);
}

TEST_CASE("single tree matches hand-enumerated majority rule on 8 rows") {
  // Every assignment of labels over the 8 rows, two binary features.
  const std::vector<std::vector<double>> rows = {{0, 0}, {0, 0}, {0, 1}, {0, 1}, {1, 0}, {1, 0}, {1, 1}, {1, 1}};
  const Matrix x = Matrix::from_rows(rows);
  std::vector<std::size_t> samples(8);
  std::iota(samples.begin(), samples.end(), 0);
  for (unsigned mask = 0; mask < 256; ++mask) {
    std::vector<int> y(8);
    for (int i = 0; i < 8; ++i) y[i] = (mask >> i) & 1;
    if (std::set<int>(y.begin(), y.end()).size() < 2) continue;
    Rng rng(mask);
    auto tree = DecisionTree::fit_classifier(x, y, 2, samples, TreeParams{}, rng);
    for (int cell = 0; cell < 4; ++cell) {
      const int ones = y[2 * cell] + y[2 * cell + 1];
      const int expected = ones == 2 ? 1 : 0;  // 1-1 ties go to class 0
      const std::vector<double> q = {static_cast<double>(cell / 2), static_cast<double>(cell % 2)};
      REQUIRE(tree.predict_class(q) == expected);
    }
  }
}

TEST_CASE("rf classifier separates two clusters") {
  auto d = clusters(100, 4, 1);
  auto m = train_rf_classifier(d.x, d.y, 100, 7);
  CHECK(accuracy(m.predict_classes(d.x), d.y) == 1.0);
  CHECK(m.trees().size() == 100);
  CHECK_FALSE(m.has_transform());
}

TEST_CASE("forest argument errors") {
  auto d = clusters(20, 4, 2);
  CHECK_THROWS_AS(train_rf_classifier(d.x, d.y, 0, 1), DomainError);
  std::vector<int> one(20, 1);
  CHECK_THROWS_AS(train_rf_classifier(d.x, one, 10, 1), DomainError);
  CHECK_THROWS_AS(train_rf_regressor(Matrix(0, 3), std::vector<double>{}, 10, 1), DomainError);
  CHECK_THROWS_AS(train_rotation_forest(Matrix::from_rows({{1, 2, 3, 4}}), std::vector<int>{0}, 10, 1), DomainError);
  CHECK_THROWS_AS(train_tsf_regressor(Matrix::from_rows({{1, 2}, {3, 4}}), std::vector<double>{0, 1}, 10, 1),
                  DomainError);
  CHECK_THROWS_AS(Matrix::from_rows({{1, 2, 3, 4}, {1, 2, 3}}), DomainError);
}

TEST_CASE("same seed gives identical models for every kind") {
  auto d = clusters(60, 6, 3);
  std::vector<double> yr(d.y.begin(), d.y.end());
  for (std::size_t r = 0; r < 60; ++r) yr[r] += d.x(r, 0);
  CHECK(train_rf_classifier(d.x, d.y, 20, 5).to_json() == train_rf_classifier(d.x, d.y, 20, 5).to_json());
  CHECK(train_rf_regressor(d.x, yr, 20, 5).to_json() == train_rf_regressor(d.x, yr, 20, 5).to_json());
  CHECK(train_rotation_forest(d.x, d.y, 20, 5).to_json() == train_rotation_forest(d.x, d.y, 20, 5).to_json());
  CHECK(train_tsf_regressor(d.x, yr, 20, 5).to_json() == train_tsf_regressor(d.x, yr, 20, 5).to_json());
  CHECK(train_rf_regressor(d.x, yr, 20, 5).to_json() != train_rf_regressor(d.x, yr, 20, 6).to_json());
  ForestOptions par;
  par.jobs = 3;
  CHECK(train_rotation_forest(d.x, d.y, 20, 5, par).to_json() == train_rotation_forest(d.x, d.y, 20, 5).to_json());
}

TEST_CASE("rf regressor: constant target and y = x0") {
  Rng rng(11);
  Matrix x(200, 1);
  std::vector<double> y(200);
  for (std::size_t r = 0; r < 200; ++r) {
    x(r, 0) = rng.uniform(-5, 5);
    y[r] = x(r, 0);
  }
  auto flat = train_rf_regressor(x, std::vector<double>(200, 4.25), 30, 1);
  for (double v : flat.predict_values(x)) CHECK(v == 4.25);

  std::vector<std::size_t> train(150), test(50);
  std::iota(train.begin(), train.end(), 0);
  std::iota(test.begin(), test.end(), 150);
  std::vector<double> ytr(y.begin(), y.begin() + 150), yte(y.begin() + 150, y.end());
  auto m = train_rf_regressor(x.select_rows(train), ytr, 100, 2);
  const auto pred = m.predict_values(x.select_rows(test));
  CHECK(rmse(pred, yte) < 0.2 * sd(y));
  // Prediction domain: within the training target range.
  const auto [lo, hi] = std::minmax_element(ytr.begin(), ytr.end());
  for (double v : pred) CHECK((v >= *lo && v <= *hi));
}

TEST_CASE("importances concentrate on the informative feature") {
  Rng rng(21);
  Matrix x(200, 3);
  std::vector<double> y(200);
  for (std::size_t r = 0; r < 200; ++r) {
    for (std::size_t c = 0; c < 3; ++c) x(r, c) = rng.uniform(-5, 5);
    y[r] = x(r, 0);
  }
  auto imp = train_rf_regressor(x, y, 50, 2).feature_importances();
  CHECK(imp[0] > imp[1]);
  CHECK(imp[0] > imp[2]);
  CHECK(std::accumulate(imp.begin(), imp.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("classifier outputs only training labels") {
  Rng rng(4);
  Matrix x(90, 5);
  std::vector<int> y(90);
  for (std::size_t r = 0; r < 90; ++r) {
    y[r] = 2 * static_cast<int>(r % 3);  // labels 0, 2, 4
    for (std::size_t c = 0; c < 5; ++c) x(r, c) = rng.normal() + y[r] * 0.3;
  }
  auto m = train_rf_classifier(x, y, 40, 9);
  auto rot = train_rotation_forest(x, y, 20, 9);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> q(5);
    for (auto& v : q) v = rng.uniform(-10, 10);
    for (int c : {m.predict_class(q), rot.predict_class(q)}) CHECK((c == 0 || c == 2 || c == 4));
  }
}

TEST_CASE("principal axes are orthonormal and ordered by variance") {
  Rng rng(5);
  Matrix d(300, 3);
  for (std::size_t r = 0; r < 300; ++r) {
    const double a = rng.normal() * 5, b = rng.normal() * 2, c = rng.normal() * 0.5;
    d(r, 0) = a + b;
    d(r, 1) = a - b;
    d(r, 2) = c;
  }
  auto ax = principal_axes(d);
  REQUIRE(ax.size() == 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double dot = 0;
      for (int k = 0; k < 3; ++k) dot += ax[i * 3 + k] * ax[j * 3 + k];
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
    }
  // First axis is (1,1,0)/sqrt2, the last is (0,0,1).
  CHECK(std::abs(ax[0]) == doctest::Approx(std::sqrt(0.5)).epsilon(0.02));
  CHECK(std::abs(ax[8]) == doctest::Approx(1.0).epsilon(0.01));
  // Rank-deficient data still yields a full basis.
  Matrix flat(10, 3);
  for (std::size_t r = 0; r < 10; ++r) flat(r, 0) = r;
  auto fx = principal_axes(flat);
  REQUIRE(fx.size() == 9);
  CHECK(std::abs(fx[0]) == doctest::Approx(1.0));
}

TEST_CASE("rotation forest identity check with one full-width group") {
  auto d = clusters(80, 6, 8);
  ForestOptions o;
  o.rotation_group_size = 6;
  auto m = train_rotation_forest(d.x, d.y, 10, 3, o);
  CHECK(accuracy(m.predict_classes(d.x), d.y) == 1.0);
  for (const auto& blocks : m.rotations()) {
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].features.size() == 6);
  }
  auto m3 = train_rotation_forest(d.x, d.y, 10, 3);
  CHECK(m3.rotations()[0].size() == 2);
  auto d7 = clusters(40, 7, 9);
  CHECK(train_rotation_forest(d7.x, d7.y, 2, 3).rotations()[0].back().features.size() == 1);
}

TEST_CASE("time series forest") {
  Rng rng(12);
  Matrix x(200, 20);
  std::vector<double> y(200);
  for (std::size_t r = 0; r < 200; ++r) {
    const double level = rng.uniform(-10, 10);
    double s = 0;
    for (std::size_t c = 0; c < 20; ++c) {
      x(r, c) = level + 0.2 * rng.normal();
      s += x(r, c);
    }
    y[r] = s / 20;
  }
  std::vector<std::size_t> train(160), test(40);
  std::iota(train.begin(), train.end(), 0);
  std::iota(test.begin(), test.end(), 160);
  std::vector<double> ytr(y.begin(), y.begin() + 160), yte(y.begin() + 160, y.end());
  auto m = train_tsf_regressor(x.select_rows(train), ytr, 100, 4);
  CHECK(rmse(m.predict_values(x.select_rows(test)), yte) < 0.1 * sd(y));
  for (const auto& ivs : m.intervals()) {
    CHECK(ivs.size() == 5);
    for (const auto& iv : ivs) CHECK((iv.length >= 3 && iv.start + iv.length <= 20));
  }

  Matrix flat(30, 10);
  for (std::size_t r = 0; r < 30; ++r)
    for (std::size_t c = 0; c < 10; ++c) flat(r, c) = 2.0;
  auto mf = train_tsf_regressor(flat, std::vector<double>(30, -1.5), 10, 1);
  CHECK(rmse(mf.predict_values(flat), std::vector<double>(30, -1.5)) == 0.0);
}

TEST_CASE("interval summary closed form") {
  const std::vector<double> s = {9, 1, 3, 5, 9};
  auto v = interval_summary(s, Interval{1, 3});
  CHECK(v[0] == doctest::Approx(3.0));
  CHECK(v[1] == doctest::Approx(std::sqrt(8.0 / 3.0)));
  CHECK(v[2] == doctest::Approx(2.0));
}

TEST_CASE("bagging covers every row with 50 trees") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto bags = bootstrap_bags(60, 50, seed);
    REQUIRE(bags.size() == 50);
    std::vector<int> seen(60, 0);
    for (const auto& b : bags) {
      REQUIRE(b.size() == 60);
      for (auto r : b) ++seen[r];
    }
    CHECK(std::count(seen.begin(), seen.end(), 0) == 0);
  }
}

TEST_CASE("json round trip preserves predictions") {
  auto d = clusters(50, 5, 13);
  std::vector<double> yr(50);
  for (std::size_t r = 0; r < 50; ++r) yr[r] = d.x(r, 1) * 2;
  std::vector<ForestModel> models = {train_rf_classifier(d.x, d.y, 10, 1), train_rotation_forest(d.x, d.y, 10, 1),
                                     train_rf_regressor(d.x, yr, 10, 1), train_tsf_regressor(d.x, yr, 10, 1)};
  for (const auto& m : models) {
    auto back = ForestModel::from_json(nlohmann::json::parse(m.to_json().dump()));
    CHECK(back.to_json() == m.to_json());
    for (std::size_t r = 0; r < 50; ++r) {
      if (m.kind() == ForestKind::RFClassifier || m.kind() == ForestKind::RotationForest)
        CHECK(back.predict_class(d.x.row(r)) == m.predict_class(d.x.row(r)));
      else
        CHECK(back.predict_value(d.x.row(r)) == m.predict_value(d.x.row(r)));
    }
  }
  auto bad = models[0].to_json();
  bad["version"] = 99;
  CHECK_THROWS_AS(ForestModel::from_json(bad), ConsistencyError);
}
