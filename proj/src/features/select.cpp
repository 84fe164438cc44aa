#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <numeric>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/features/features.hpp"
#include "trajsel/models/forest.hpp"

namespace trajsel::features {

std::vector<std::size_t> SelectionMask::kept_indices() const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) idx.push_back(i);
  return idx;
}

double binomial_two_sided_p(int hits, int n) {
  boost::math::binomial_distribution<double> dist(n, 0.5);
  const double lower = boost::math::cdf(dist, hits);
  const double upper = hits > 0 ? boost::math::cdf(boost::math::complement(dist, hits - 1)) : 1.0;
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

namespace {

template <typename Target, typename Train>
SelectionMask shadow_select(const models::Matrix& x, std::span<const Target> y, std::uint64_t seed,
                            const SelectionOptions& options, Train train) {
  if (options.iterations < 10) throw DomainError("feature selection needs at least 10 iterations");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (x.rows() < 20) throw DomainError("feature selection needs at least 20 rows");
  if (y.size() != x.rows()) throw DomainError("target count does not match rows");
  const std::size_t n = x.rows(), p = x.cols();
  if (p == 0) throw DomainError("no features to select from");

  SelectionMask mask;
  mask.iterations = options.iterations;
  mask.alpha = options.alpha;
  mask.hits.assign(p, 0);
  std::vector<double> total(p, 0.0);
  models::ForestOptions fo;
  fo.jobs = options.jobs;
  std::vector<std::size_t> perm(n);
  for (int it = 0; it < options.iterations; ++it) {
    Rng rng(derive_seed(seed, "shadow", {static_cast<std::uint64_t>(it)}));
    models::Matrix wide(n, 2 * p);
    for (std::size_t c = 0; c < p; ++c) {
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm.begin(), perm.end());
      for (std::size_t r = 0; r < n; ++r) {
        wide(r, c) = x(r, c);
        wide(r, p + c) = x(perm[r], c);
      }
    }
    const auto model = train(wide, y, options.trees_per_iteration,
                             derive_seed(seed, "shadow-forest", {static_cast<std::uint64_t>(it)}), fo);
    const auto imp = model.feature_importances();
    const double shadow_max = *std::max_element(imp.begin() + static_cast<std::ptrdiff_t>(p), imp.end());
    for (std::size_t c = 0; c < p; ++c) {
      mask.hits[c] += imp[c] > shadow_max;
      total[c] += imp[c];
    }
  }
  mask.keep.assign(p, false);
  bool any = false;
  for (std::size_t c = 0; c < p; ++c) {
    if (2 * mask.hits[c] > options.iterations &&
        binomial_two_sided_p(mask.hits[c], options.iterations) < options.alpha) {
      mask.keep[c] = true;
      any = true;
    }
  }
  if (!any) {
    mask.fallback = true;
    mask.keep[std::max_element(total.begin(), total.end()) - total.begin()] = true;
  }
  return mask;
}

}  // namespace

SelectionMask select_features(const models::Matrix& x, std::span<const int> y, std::uint64_t seed,
                              const SelectionOptions& options) {
  return shadow_select(x, y, seed, options, [](auto&&... a) { return models::train_rf_classifier(a...); });
}

SelectionMask select_features(const models::Matrix& x, std::span<const double> y, std::uint64_t seed,
                              const SelectionOptions& options) {
  return shadow_select(x, y, seed, options, [](auto&&... a) { return models::train_rf_regressor(a...); });
}

}  // namespace trajsel::features
