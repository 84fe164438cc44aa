#include "trajsel/models/metrics.hpp"

#include <cmath>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/stats.hpp"

namespace trajsel::models {

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw DomainError("prediction and truth lengths differ");
  if (truth.empty()) throw DomainError("accuracy of an empty set");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

double rmse(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw DomainError("prediction and truth lengths differ");
  if (truth.empty()) throw DomainError("rmse of an empty set");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) s += (predicted[i] - truth[i]) * (predicted[i] - truth[i]);
  return std::sqrt(s / static_cast<double>(truth.size()));
}

Metrics Metrics::from_folds(bool is_accuracy, std::vector<double> per_fold) {
  Metrics m;
  m.is_accuracy = is_accuracy;
  m.median = stats::median(per_fold);
  m.mean = stats::mean(per_fold);
  m.per_fold = std::move(per_fold);
  return m;
}

}  // namespace trajsel::models
