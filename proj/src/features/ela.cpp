#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/stats.hpp"
#include "trajsel/features/features.hpp"

namespace trajsel::features {

const std::vector<std::string>& ela_feature_names() {
  static const std::vector<std::string> names = {
      "distr_skewness",  "distr_kurtosis",     "distr_peaks",   "lin_simple_adj_r2", "lin_simple_intercept",
      "quad_simple_adj_r2", "quad_simple_cond", "disp_ratio_mean_02", "ic_h_max",       "ic_eps_s"};
  return names;
}

namespace {

constexpr int kKdeGrid = 512;
constexpr double kPeakFloor = 0.05;
constexpr double kSettle = 0.05;

int density_peaks(std::span<const double> y) {
  const double sd = std::sqrt(stats::variance(y));
  if (!(sd > 0.0)) return 0;
  const double mu = stats::mean(y);
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = (y[i] - mu) / sd;
  const double h = 1.06 * std::pow(static_cast<double>(z.size()), -0.2);
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  const double a = *lo - 3 * h, b = *hi + 3 * h;
  std::vector<double> dens(kKdeGrid, 0.0);
  for (int g = 0; g < kKdeGrid; ++g) {
    const double t = a + (b - a) * g / (kKdeGrid - 1);
    for (double v : z) dens[g] += std::exp(-0.5 * (t - v) * (t - v) / (h * h));
  }
  const double top = *std::max_element(dens.begin(), dens.end());
  int peaks = 0;
  for (int g = 1; g + 1 < kKdeGrid; ++g)
    if (dens[g] > dens[g - 1] && dens[g] >= dens[g + 1] && dens[g] >= kPeakFloor * top) ++peaks;
  return peaks;
}

struct Fit {
  Eigen::VectorXd coef;
  double adj_r2 = 0.0;
};

Fit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  Fit f;
  f.coef = design.colPivHouseholderQr().solve(y);
  const double n = static_cast<double>(y.size());
  const double k = static_cast<double>(design.cols() - 1);
  const double ss_tot = (y.array() - y.mean()).square().sum();
  const double ss_res = (design * f.coef - y).squaredNorm();
  if (ss_tot > 0.0 && n - k - 1 > 0) {
    const double r2 = 1.0 - ss_res / ss_tot;
    f.adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - k - 1);
  }
  return f;
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double mean_pairwise(std::span<const bench::Sample> s, std::span<const std::size_t> idx) {
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j, ++count) total += distance(s[idx[i]].point, s[idx[j]].point);
  return count ? total / static_cast<double>(count) : 0.0;
}

double ic_entropy(std::span<const double> slopes, double eps) {
  std::vector<int> sym(slopes.size());
  for (std::size_t i = 0; i < slopes.size(); ++i) sym[i] = slopes[i] < -eps ? 0 : (slopes[i] > eps ? 2 : 1);
  int counts[3][3] = {};
  for (std::size_t i = 0; i + 1 < sym.size(); ++i) ++counts[sym[i]][sym[i + 1]];
  const double m = static_cast<double>(sym.size() - 1);
  double h = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b && counts[a][b] > 0) {
        const double p = counts[a][b] / m;
        h -= p * std::log(p) / std::log(6.0);
      }
  return h;
}

}  // namespace

FeatureVector ela_features(std::span<const bench::Sample> samples) {
  if (samples.size() < 50) throw DomainError("landscape features need at least 50 samples");
  const std::size_t n = samples.size();
  const std::size_t d = samples[0].point.size();
  if (d == 0) throw DomainError("samples have no coordinates");
  for (const auto& s : samples)
    if (s.point.size() != d) throw DomainError("samples disagree on dimension");

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = samples[i].fitness;
  Eigen::VectorXd ye = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(n));

  Eigen::MatrixXd lin(n, d + 1), quad(n, 2 * d + 1);
  for (std::size_t i = 0; i < n; ++i) {
    lin(i, 0) = quad(i, 0) = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double v = samples[i].point[j];
      lin(i, j + 1) = quad(i, j + 1) = v;
      quad(i, d + 1 + j) = v * v;
    }
  }
  const Fit lf = least_squares(lin, ye);
  const Fit qf = least_squares(quad, ye);
  const auto quad_terms = qf.coef.tail(static_cast<Eigen::Index>(d)).cwiseAbs();
  const double cond = quad_terms.maxCoeff() / quad_terms.minCoeff();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  const std::size_t q = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(0.02 * n)));
  const double all_pairs = mean_pairwise(samples, order);
  const double disp = all_pairs > 0.0 ? mean_pairwise(samples, std::span(order).first(q)) / all_pairs : 0.0;

  // Nearest-neighbour tour from the first sample, then symbolised slopes.
  std::vector<std::size_t> tour{0};
  std::vector<char> used(n, 0);
  used[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    const auto& cur = samples[tour.back()].point;
    std::size_t next = n;
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double dist = distance(cur, samples[j].point);
      if (next == n || dist < best) {
        best = dist;
        next = j;
      }
    }
    used[next] = 1;
    tour.push_back(next);
  }
  std::vector<double> slopes(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = distance(samples[tour[i]].point, samples[tour[i + 1]].point);
    slopes[i] = dx > 0.0 ? (y[tour[i + 1]] - y[tour[i]]) / dx : 0.0;
  }
  double h_max = ic_entropy(slopes, 0.0);
  double eps_s = 15.0;
  bool settled = false;
  // Positive grid 10^-5 .. 10^15 in steps of 0.05 decades.
  for (int k = 0; k <= 400; ++k) {
    const double log_eps = -5.0 + 0.05 * k;
    const double h = ic_entropy(slopes, std::pow(10.0, log_eps));
    h_max = std::max(h_max, h);
    if (!settled && h < kSettle) {
      eps_s = log_eps;
      settled = true;
    }
  }

  FeatureVector fv;
  fv.names = ela_feature_names();
  fv.values = {stats::skewness(y),
               stats::kurtosis(y),
               static_cast<double>(density_peaks(y)),
               lf.adj_r2,
               lf.coef(0),
               qf.adj_r2,
               cond,
               disp,
               h_max,
               eps_s};
  fv.sanitized = sanitize(fv.values);
  return fv;
}

}  // namespace trajsel::features
