#include "trajsel/solvers/labeling.hpp"

#include <string>
#include <vector>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/common/stats.hpp"
#include "trajsel/solvers/portfolio.hpp"

namespace trajsel::solvers {

SolverId best_by_median(const std::array<double, 3>& medians) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (medians[i] < medians[best]) best = i;
  return kPortfolio[best];
}

PortfolioLabel label_portfolio(const bench::ProblemInstance& instance, int runs, long truth_budget,
                               std::uint64_t seed) {
  if (runs < 1) throw DomainError("runs must be >= 1");
  PortfolioLabel label;
  label.function_id = instance.function_id();
  label.instance_id = instance.instance_id();
  for (SolverId solver : kPortfolio) {
    const auto params = default_params(solver, instance.dim());
    const long generations = truth_budget / params.population;
    if (generations < 1)
      throw BudgetError("truth budget " + std::to_string(truth_budget) + " is below one generation of " +
                        std::string(to_string(solver)));
    std::vector<double> finals;
    for (int r = 0; r < runs; ++r) {
      bench::EvalBudget budget(truth_budget);
      const auto run_seed = derive_seed(seed, "label", {portfolio_index(solver), static_cast<std::uint64_t>(r)});
      auto run = run_portfolio_solver(instance, params, static_cast<int>(generations), run_seed, budget);
      finals.push_back(run.final_best - instance.f_opt());
    }
    label.median_final[portfolio_index(solver)] = stats::median(finals);
  }
  label.best_solver = best_by_median(label.median_final);
  return label;
}

nlohmann::json to_json(const PortfolioLabel& label) {
  nlohmann::json medians;
  for (SolverId s : kPortfolio) medians[std::string(to_string(s))] = label.target(s);
  return {{"function_id", label.function_id},
          {"instance_id", label.instance_id},
          {"median_final", medians},
          {"best_solver", to_string(label.best_solver)}};
}

PortfolioLabel label_from_json(const nlohmann::json& j) {
  PortfolioLabel label;
  try {
    label.function_id = j.at("function_id").get<int>();
    label.instance_id = j.at("instance_id").get<int>();
    for (SolverId s : kPortfolio)
      label.median_final[portfolio_index(s)] = j.at("median_final").at(std::string(to_string(s))).get<double>();
    label.best_solver = solver_from_string(j.at("best_solver").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConsistencyError(std::string("malformed label record: ") + e.what());
  }
  return label;
}

}  // namespace trajsel::solvers
