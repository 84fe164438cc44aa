#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "trajsel/bench/instance.hpp"
#include "trajsel/solvers/run_result.hpp"

namespace trajsel::solvers {

struct SolverParams {
  SolverId solver_id = SolverId::CMAES;
  int population = 10;
  std::map<std::string, double> constants;
};

/// Community defaults. Populations scale as 4+floor(3 ln d), 3d and 4d, which
/// gives 10 / 30 / 40 at d = 10.
SolverParams default_params(SolverId id, int dim);

/// (mu/mu_w, lambda) CMA-ES for exactly population * generations evaluations.
RunResult run_cmaes(const bench::ProblemInstance& instance, const SolverParams& params, int generations,
                    std::uint64_t seed, bench::EvalBudget& budget);
/// DE/rand/1/bin; generation 1 evaluates the initial population.
RunResult run_de(const bench::ProblemInstance& instance, const SolverParams& params, int generations,
                 std::uint64_t seed, bench::EvalBudget& budget);
/// Global-best PSO with inertia weight; generation 1 evaluates the initial swarm.
RunResult run_pso(const bench::ProblemInstance& instance, const SolverParams& params, int generations,
                  std::uint64_t seed, bench::EvalBudget& budget);

/// Dispatches on params.solver_id (portfolio solvers only).
RunResult run_portfolio_solver(const bench::ProblemInstance& instance, const SolverParams& params,
                               int generations, std::uint64_t seed, bench::EvalBudget& budget);

}  // namespace trajsel::solvers
