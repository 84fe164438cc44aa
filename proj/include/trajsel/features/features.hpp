#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trajsel/bench/sampling.hpp"
#include "trajsel/models/matrix.hpp"
#include "trajsel/trajectory/trajectory.hpp"

namespace trajsel::features {

inline constexpr double kClamp = 1e12;

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
  int sanitized = 0;  // entries that were NaN or infinite before clamping
};

/// NaN -> 0, +-inf -> +-1e12. Returns the number of entries replaced.
int sanitize(std::vector<double>& values);

const std::vector<std::string>& ts_feature_names();
/// The fixed 22-feature summary of a series of length >= 3.
FeatureVector ts_features(std::span<const double> series);
inline FeatureVector ts_features(const trajectory::Trajectory& t) { return ts_features(t.values); }

struct SelectionMask {
  std::vector<bool> keep;
  std::vector<int> hits;
  int iterations = 0;
  double alpha = 0.0;
  bool fallback = false;

  std::vector<std::size_t> kept_indices() const;
};

struct SelectionOptions {
  int iterations = 50;
  double alpha = 0.05;
  int trees_per_iteration = 50;
  unsigned jobs = 1;
};

/// Shadow-feature selection against a classification target.
SelectionMask select_features(const models::Matrix& x, std::span<const int> y, std::uint64_t seed,
                              const SelectionOptions& options = {});
/// Same procedure with a regression forest as the importance model.
SelectionMask select_features(const models::Matrix& x, std::span<const double> y, std::uint64_t seed,
                              const SelectionOptions& options = {});

/// Two-sided binomial test of `hits` successes in n trials at p = 0.5.
double binomial_two_sided_p(int hits, int n);

const std::vector<std::string>& ela_feature_names();
/// Ten landscape features from >= 50 samples of one instance.
FeatureVector ela_features(std::span<const bench::Sample> samples);

}  // namespace trajsel::features
