#pragma once

#include <span>
#include <vector>

namespace trajsel::stats {

double mean(std::span<const double> xs);
/// Population variance (divides by n).
double variance(std::span<const double> xs);
double median(std::span<const double> xs);
/// Third standardized moment; 0 when the variance is 0.
double skewness(std::span<const double> xs);
/// Excess kurtosis (m4 / m2^2 - 3); 0 when the variance is 0.
double kurtosis(std::span<const double> xs);

/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

}  // namespace trajsel::stats
