#pragma once

#include <cstdint>
#include <vector>

#include "trajsel/bench/instance.hpp"

namespace trajsel::bench {

inline constexpr int kMaxSobolDim = 10;

/// Unscrambled Sobol points in [0,1)^dim, starting at index 0 (the origin).
/// dim must be in [1, kMaxSobolDim].
std::vector<std::vector<double>> sobol_points(std::size_t count, int dim);

/// Unit-cube design: digitally shifted Sobol for dim <= 10, stratified Latin
/// hypercube above. Deterministic per seed.
std::vector<std::vector<double>> unit_design(std::size_t count, int dim, std::uint64_t seed);

struct Sample {
  std::vector<double> point;
  double fitness;
};

/// k design points scaled to [-5,5]^d and evaluated against the budget.
std::vector<Sample> low_discrepancy_sample(const ProblemInstance& instance, int k, std::uint64_t seed,
                                           EvalBudget& budget);

}  // namespace trajsel::bench
