#pragma once

#include <cstdint>
#include <vector>

#include "trajsel/solvers/gsa.hpp"
#include "trajsel/solvers/run_result.hpp"
#include "trajsel/trajectory/trajectory.hpp"

namespace trajsel::trajectory {

/// The problem instances and run count a set of probes covers.
struct Suite {
  std::vector<int> functions;
  std::vector<int> instances;
  int dim = 10;
  int runs = 5;
};

/// One SA probe per (function, instance, run), in that nesting order. Run r
/// on (f, i) uses derive_seed(seed, "probe", {f, i, r}).
std::vector<Trajectory> sa_probes(const solvers::SAConfig& config, const Suite& suite, TrajectoryKind kind,
                                  std::uint64_t seed, unsigned jobs = 1);

/// Portfolio solver trajectories for `generations` generations, same ordering
/// and seeding scheme with tag "portfolio-probe" and the solver index.
std::vector<Trajectory> portfolio_probes(solvers::SolverId solver, int generations, const Suite& suite,
                                         TrajectoryKind kind, std::uint64_t seed, unsigned jobs = 1);

/// Per run, the CMAES, DE and PSO probes joined into one "ALL" series.
std::vector<Trajectory> all_probes(int generations, const Suite& suite, TrajectoryKind kind, std::uint64_t seed,
                                   unsigned jobs = 1);

}  // namespace trajsel::trajectory
