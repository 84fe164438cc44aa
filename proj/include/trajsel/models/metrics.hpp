#pragma once

#include <span>
#include <vector>

namespace trajsel::models {

double accuracy(std::span<const int> predicted, std::span<const int> truth);
double rmse(std::span<const double> predicted, std::span<const double> truth);

/// Per-fold metric values with their median (the headline aggregate) and mean.
struct Metrics {
  bool is_accuracy = true;
  std::vector<double> per_fold;
  double median = 0.0;
  double mean = 0.0;

  static Metrics from_folds(bool is_accuracy, std::vector<double> per_fold);
};

}  // namespace trajsel::models
