#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "trajsel/bench/instance.hpp"
#include "trajsel/bench/sampling.hpp"
#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/features/features.hpp"

using namespace trajsel;
using namespace trajsel::features;

namespace {

double feature(const FeatureVector& fv, const std::string& name) {
  const auto it = std::find(fv.names.begin(), fv.names.end(), name);
  REQUIRE(it != fv.names.end());
  return fv.values[it - fv.names.begin()];
}

// Direct moment formulas, independent of the stats helpers.
double oracle_skew(const std::vector<double>& y) {
  long double m = 0, m2 = 0, m3 = 0;
  for (double v : y) m += v;
  m /= y.size();
  for (double v : y) {
    m2 += (v - m) * (v - m);
    m3 += (v - m) * (v - m) * (v - m);
  }
  m2 /= y.size();
  m3 /= y.size();
  return static_cast<double>(m3 / std::pow(m2, 1.5L));
}

std::vector<bench::Sample> sobol_samples(std::size_t n, std::size_t d, auto f) {
  std::vector<bench::Sample> s;
  for (const auto& u : bench::sobol_points(n, d)) {
    bench::Sample smp;
    for (double v : u) smp.point.push_back(-5.0 + 10.0 * v);
    smp.fitness = f(smp.point);
    s.push_back(smp);
  }
  return s;
}

struct SelectionData {
  models::Matrix x;
  std::vector<int> y;
};

SelectionData informative_set(std::uint64_t seed, bool noise_only) {
  Rng rng(seed);
  SelectionData d{models::Matrix(200, 10), std::vector<int>(200)};
  for (std::size_t r = 0; r < 200; ++r) {
    d.y[r] = static_cast<int>(rng.below(2));
    for (std::size_t c = 0; c < 10; ++c) d.x(r, c) = rng.normal();
    if (!noise_only) d.x(r, 0) = d.y[r] + 0.01 * rng.normal();
  }
  return d;
}

}  // namespace

TEST_CASE("series features: names and simple cases") {
  CHECK(ts_feature_names().size() == 22);
  auto c = ts_features(std::vector<double>(10, 4.0));
  CHECK(c.values.size() == 22);
  CHECK(feature(c, "variance") == 0.0);
  CHECK(feature(c, "trend_slope") == 0.0);
  CHECK(feature(c, "mean") == 4.0);
  CHECK(feature(c, "skewness") == 0.0);
  CHECK(feature(c, "binned_entropy") == 0.0);

  auto line = ts_features(std::vector<double>{1, 2, 3});
  CHECK(feature(line, "trend_slope") == doctest::Approx(1.0));
  CHECK(feature(line, "mean") == 2.0);
  CHECK(feature(line, "trend_intercept") == doctest::Approx(1.0));
  CHECK(feature(line, "trend_r2") == doctest::Approx(1.0));
  CHECK(feature(line, "abs_energy") == 14.0);
  CHECK_THROWS_AS(ts_features(std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("alternating series has lag-1 autocorrelation -1") {
  std::vector<double> x(50);
  for (int i = 0; i < 50; ++i) x[i] = i % 2 ? -1.0 : 1.0;
  // Oracle: sample autocorrelation computed directly.
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / 50;
  double num = 0, den = 0;
  for (int i = 0; i < 50; ++i) den += (x[i] - m) * (x[i] - m);
  for (int i = 0; i + 1 < 50; ++i) num += (x[i] - m) * (x[i + 1] - m);
  const double rho = num / 49 / (den / 50);
  auto fv = ts_features(x);
  CHECK(std::abs(feature(fv, "autocorr_lag1") + 1.0) < 0.05);
  CHECK(feature(fv, "autocorr_lag1") == doctest::Approx(rho));
  CHECK(feature(fv, "autocorr_lag2") == doctest::Approx(1.0));
  CHECK(feature(fv, "local_maxima") == 24);
}

TEST_CASE("run and count features by hand") {
  auto fv = ts_features(std::vector<double>{5, 0, 0, 0, 6, 1, 9});
  // mean 3: values below 3 -> runs of 3 then 1.
  CHECK(feature(fv, "longest_strike_below_mean") == 3);
  CHECK(feature(fv, "count_above_mean") == 3);
  CHECK(feature(fv, "median") == 1);
  CHECK(feature(fv, "mean_abs_change") == doctest::Approx((5 + 0 + 0 + 6 + 5 + 8) / 6.0));
}

TEST_CASE("sanitization keeps outputs finite") {
  std::vector<double> v = {NAN, INFINITY, -INFINITY, 2.0};
  CHECK(sanitize(v) == 3);
  CHECK(v == std::vector<double>{0.0, kClamp, -kClamp, 2.0});
  auto big = ts_features(std::vector<double>{1e200, -1e200, 1e200, 3.0});
  for (double x : big.values) CHECK(std::isfinite(x));
  CHECK(big.sanitized > 0);
}

TEST_CASE("landscape features: linear and sphere") {
  CHECK(ela_feature_names().size() == 10);
  auto lin = sobol_samples(300, 5, [](const std::vector<double>& x) { return 3.0 + 2 * x[0] - x[3]; });
  auto fl = ela_features(lin);
  CHECK(std::abs(feature(fl, "lin_simple_adj_r2") - 1.0) < 1e-6);
  CHECK(feature(fl, "lin_simple_intercept") == doctest::Approx(3.0));

  // Sphere fitness over the cube is a sum of d i.i.d. squared uniforms, whose
  // skewness is 0.63887 / sqrt(d) (moments of U^2: 1/3, 1/5, 1/7).
  const double u2_var = 1.0 / 5 - 1.0 / 9;
  const double u2_m3 = 1.0 / 7 - 3.0 / 15 + 2.0 / 27;
  const double analytic = u2_m3 / std::pow(u2_var, 1.5) / std::sqrt(10.0);
  std::vector<bench::Sample> sphere;
  for (const auto& u : bench::unit_design(4096, 10, 1)) {
    bench::Sample smp;
    for (double v : u) smp.point.push_back(-5.0 + 10.0 * v);
    smp.fitness = std::inner_product(smp.point.begin(), smp.point.end(), smp.point.begin(), 0.0);
    sphere.push_back(smp);
  }
  std::vector<double> y;
  for (const auto& s : sphere) y.push_back(s.fitness);
  auto fs = ela_features(sphere);
  CHECK(feature(fs, "distr_skewness") == doctest::Approx(oracle_skew(y)).epsilon(1e-9));
  CHECK(std::abs(feature(fs, "distr_skewness") - analytic) < 0.02);
  CHECK(feature(fs, "quad_simple_adj_r2") == doctest::Approx(1.0));
  for (double v : fs.values) CHECK(std::isfinite(v));
}

TEST_CASE("landscape features: constant fitness and scale invariance") {
  auto flat = sobol_samples(64, 3, [](const std::vector<double>&) { return 7.0; });
  auto ff = ela_features(flat);
  CHECK(feature(ff, "distr_skewness") == 0.0);
  CHECK(feature(ff, "distr_kurtosis") == 0.0);
  for (double v : ff.values) CHECK(std::isfinite(v));

  auto p = bench::make_instance(21, 1, 5);
  auto base = sobol_samples(200, 5, [&](const std::vector<double>& x) { return p.value(x); });
  auto scaled = base;
  for (auto& s : scaled) s.fitness = 3.5 * s.fitness - 40.0;
  auto a = ela_features(base), b = ela_features(scaled);
  CHECK(std::abs(feature(a, "distr_skewness") - feature(b, "distr_skewness")) < 1e-9);
  CHECK(std::abs(feature(a, "distr_kurtosis") - feature(b, "distr_kurtosis")) < 1e-9);
  CHECK(ela_features(base).values == a.values);

  CHECK_THROWS_AS(ela_features(std::span(base).first(49)), DomainError);
}

TEST_CASE("binomial two-sided p-values") {
  // Exact: P(X <= 0) = 2^-10 for n = 10, doubled.
  CHECK(binomial_two_sided_p(0, 10) == doctest::Approx(2.0 / 1024));
  CHECK(binomial_two_sided_p(10, 10) == doctest::Approx(2.0 / 1024));
  CHECK(binomial_two_sided_p(5, 10) == 1.0);
}

TEST_CASE("shadow selection keeps the informative feature") {
  SelectionOptions opt;
  int kept = 0;
  const int reps = 100;
  for (int seed = 0; seed < reps; ++seed) {
    auto d = informative_set(seed, false);
    auto mask = select_features(d.x, d.y, seed, opt);
    kept += mask.keep[0] ? 1 : 0;
  }
  CHECK(kept >= 95);

  auto noise = informative_set(77, true);
  auto m = select_features(noise.x, noise.y, 5, opt);
  CHECK(m.fallback);
  CHECK(std::count(m.keep.begin(), m.keep.end(), true) == 1);

  SelectionOptions zero;
  zero.iterations = 0;
  CHECK_THROWS_AS(select_features(noise.x, noise.y, 5, zero), DomainError);
  std::vector<int> single(200, 1);
  CHECK_THROWS_AS(select_features(noise.x, single, 5, opt), DomainError);
}
