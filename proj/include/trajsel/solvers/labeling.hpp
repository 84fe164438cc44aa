#pragma once

#include <array>
#include <cstdint>

#include "json.hpp"
#include "trajsel/bench/instance.hpp"
#include "trajsel/solvers/run_result.hpp"

namespace trajsel::solvers {

/// Ground truth for one instance. median_final holds the median final
/// precision (best fitness minus f_opt) per portfolio solver, in kPortfolio order.
struct PortfolioLabel {
  int function_id = 0;
  int instance_id = 0;
  std::array<double, 3> median_final{};
  SolverId best_solver = SolverId::CMAES;

  double target(SolverId solver) const { return median_final[portfolio_index(solver)]; }
};

/// argmin over the medians, ties resolved by portfolio order.
SolverId best_by_median(const std::array<double, 3>& medians);

/// Runs every portfolio solver `runs` times for truth_budget evaluations
/// (rounded down to whole generations).
PortfolioLabel label_portfolio(const bench::ProblemInstance& instance, int runs, long truth_budget,
                               std::uint64_t seed);

nlohmann::json to_json(const PortfolioLabel& label);
PortfolioLabel label_from_json(const nlohmann::json& j);

}  // namespace trajsel::solvers
