#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/stats.hpp"
#include "trajsel/features/features.hpp"

namespace trajsel::features {

int sanitize(std::vector<double>& values) {
  int replaced = 0;
  for (auto& v : values) {
    if (std::isnan(v)) {
      v = 0.0;
      ++replaced;
    } else if (std::isinf(v)) {
      v = v > 0 ? kClamp : -kClamp;
      ++replaced;
    }
  }
  return replaced;
}

const std::vector<std::string>& ts_feature_names() {
  static const std::vector<std::string> names = {
      "mean",          "variance",        "std",           "skewness",        "kurtosis",
      "min",           "max",             "median",        "first",           "last",
      "abs_energy",    "mean_abs_change", "autocorr_lag1", "autocorr_lag2",   "autocorr_lag3",
      "trend_slope",   "trend_intercept", "trend_r2",      "count_above_mean", "longest_strike_below_mean",
      "local_maxima",  "binned_entropy"};
  return names;
}

namespace {

double autocorrelation(std::span<const double> x, std::size_t lag, double mean, double var) {
  if (!(var > 0.0) || lag >= x.size()) return 0.0;
  double s = 0.0;
  for (std::size_t t = 0; t + lag < x.size(); ++t) s += (x[t] - mean) * (x[t + lag] - mean);
  return s / (static_cast<double>(x.size() - lag) * var);
}

double binned_entropy(std::span<const double> x, double lo, double hi) {
  constexpr int kBins = 10;
  if (!(hi > lo)) return 0.0;
  std::array<int, kBins> counts{};
  for (double v : x) {
    int b = static_cast<int>((v - lo) / (hi - lo) * kBins);
    ++counts[std::clamp(b, 0, kBins - 1)];
  }
  double h = 0.0;
  for (int c : counts)
    if (c > 0) {
      const double p = static_cast<double>(c) / static_cast<double>(x.size());
      h -= p * std::log(p);
    }
  return h;
}

}  // namespace

FeatureVector ts_features(std::span<const double> x) {
  if (x.size() < 3) throw DomainError("series features need at least 3 values");
  const std::size_t n = x.size();
  const double mean = stats::mean(x);
  const double var = stats::variance(x);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());

  double energy = 0.0, abs_change = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    energy += x[i] * x[i];
    if (i > 0) abs_change += std::abs(x[i] - x[i - 1]);
  }

  const double tbar = 0.5 * static_cast<double>(n - 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = static_cast<double>(i) - tbar;
    sxy += dt * (x[i] - mean);
    sxx += dt * dt;
    syy += (x[i] - mean) * (x[i] - mean);
  }
  const double slope = sxy / sxx;
  const double intercept = mean - slope * tbar;
  const double r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;

  int above = 0, maxima = 0;
  int run = 0, longest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    above += x[i] > mean;
    run = x[i] < mean ? run + 1 : 0;
    longest = std::max(longest, run);
    if (i > 0 && i + 1 < n && x[i] > x[i - 1] && x[i] > x[i + 1]) ++maxima;
  }

  FeatureVector fv;
  fv.names = ts_feature_names();
  fv.values = {mean,
               var,
               std::sqrt(var),
               stats::skewness(x),
               stats::kurtosis(x),
               *lo,
               *hi,
               stats::median(x),
               x.front(),
               x.back(),
               energy,
               abs_change / static_cast<double>(n - 1),
               autocorrelation(x, 1, mean, var),
               autocorrelation(x, 2, mean, var),
               autocorrelation(x, 3, mean, var),
               slope,
               intercept,
               r2,
               static_cast<double>(above),
               static_cast<double>(longest),
               static_cast<double>(maxima),
               binned_entropy(x, *lo, *hi)};
  fv.sanitized = sanitize(fv.values);
  return fv;
}

}  // namespace trajsel::features
