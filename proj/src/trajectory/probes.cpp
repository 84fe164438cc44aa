#include "trajsel/trajectory/probes.hpp"

#include "trajsel/bench/instance.hpp"
#include "trajsel/common/errors.hpp"
#include "trajsel/common/parallel.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/solvers/portfolio.hpp"

namespace trajsel::trajectory {

namespace {

struct Slot {
  int function_id;
  int instance_id;
  int run;
};

std::vector<Slot> slots(const Suite& suite) {
  if (suite.functions.empty() || suite.instances.empty() || suite.runs < 1)
    throw DomainError("probe suite needs functions, instances and at least one run");
  std::vector<Slot> out;
  for (int f : suite.functions)
    for (int i : suite.instances)
      for (int r = 0; r < suite.runs; ++r) out.push_back({f, i, r});
  return out;
}

template <typename Run>
std::vector<Trajectory> generate(const Suite& suite, unsigned jobs, Run run) {
  const auto todo = slots(suite);
  // Instances are built once per (function, instance) pair.
  std::vector<bench::ProblemInstance> problems;
  for (int f : suite.functions)
    for (int i : suite.instances) problems.push_back(bench::make_instance(f, i, suite.dim));
  std::vector<Trajectory> out(todo.size());
  parallel_for(todo.size(), jobs, [&](std::size_t k) {
    out[k] = run(problems[k / static_cast<std::size_t>(suite.runs)], todo[k]);
  });
  return out;
}

}  // namespace

std::vector<Trajectory> sa_probes(const solvers::SAConfig& config, const Suite& suite, TrajectoryKind kind,
                                  std::uint64_t seed, unsigned jobs) {
  solvers::validate(config);
  return generate(suite, jobs, [&](const bench::ProblemInstance& p, const Slot& s) {
    bench::EvalBudget budget(config.n_samples);
    const auto run_seed = derive_seed(seed, "probe",
                                      {static_cast<std::uint64_t>(s.function_id),
                                       static_cast<std::uint64_t>(s.instance_id), static_cast<std::uint64_t>(s.run)});
    const auto res = solvers::run_gsa(p, config, run_seed, budget);
    return from_run(res, kind, "SA", s.function_id, s.instance_id, s.run);
  });
}

std::vector<Trajectory> portfolio_probes(solvers::SolverId solver, int generations, const Suite& suite,
                                         TrajectoryKind kind, std::uint64_t seed, unsigned jobs) {
  if (solver == solvers::SolverId::SA) throw DomainError("SA probes are configured with an SAConfig");
  if (generations < 1) throw DomainError("need at least one generation");
  return generate(suite, jobs, [&](const bench::ProblemInstance& p, const Slot& s) {
    const auto params = solvers::default_params(solver, p.dim());
    bench::EvalBudget budget(static_cast<long>(params.population) * generations);
    const auto run_seed =
        derive_seed(seed, "portfolio-probe",
                    {solvers::portfolio_index(solver), static_cast<std::uint64_t>(s.function_id),
                     static_cast<std::uint64_t>(s.instance_id), static_cast<std::uint64_t>(s.run)});
    const auto res = solvers::run_portfolio_solver(p, params, generations, run_seed, budget);
    return from_run(res, kind, std::string(solvers::to_string(solver)), s.function_id, s.instance_id, s.run);
  });
}

std::vector<Trajectory> all_probes(int generations, const Suite& suite, TrajectoryKind kind, std::uint64_t seed,
                                   unsigned jobs) {
  std::vector<std::vector<Trajectory>> per;
  for (auto s : solvers::kPortfolio) per.push_back(portfolio_probes(s, generations, suite, kind, seed, jobs));
  std::vector<Trajectory> out;
  for (std::size_t k = 0; k < per[0].size(); ++k) {
    const std::vector<Trajectory> parts = {per[0][k], per[1][k], per[2][k]};
    out.push_back(concat_all(parts));
  }
  return out;
}

}  // namespace trajsel::trajectory
