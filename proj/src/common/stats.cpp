#include "trajsel/common/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trajsel/common/errors.hpp"

namespace trajsel::stats {

namespace {

void require_nonempty(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("statistic of an empty sample");
}

// Central moment of order k around the mean.
double central_moment(std::span<const double> xs, double mu, int k) {
  double acc = 0.0;
  for (double x : xs) acc += std::pow(x - mu, k);
  return acc / static_cast<double>(xs.size());
}

}  // namespace

double mean(std::span<const double> xs) {
  require_nonempty(xs);
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  const double mu = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(xs.size());
}

double median(std::span<const double> xs) {
  require_nonempty(xs);
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double skewness(std::span<const double> xs) {
  const double mu = mean(xs);
  const double m2 = central_moment(xs, mu, 2);
  if (!(m2 > 0.0)) return 0.0;
  const double m3 = central_moment(xs, mu, 3);
  const double s = m3 / std::pow(m2, 1.5);
  return std::isfinite(s) ? s : 0.0;
}

double kurtosis(std::span<const double> xs) {
  const double mu = mean(xs);
  const double m2 = central_moment(xs, mu, 2);
  if (!(m2 > 0.0)) return 0.0;
  const double m4 = central_moment(xs, mu, 4);
  const double k = m4 / (m2 * m2) - 3.0;
  return std::isfinite(k) ? k : 0.0;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace trajsel::stats
