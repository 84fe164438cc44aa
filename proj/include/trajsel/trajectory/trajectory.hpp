#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajsel/solvers/run_result.hpp"

namespace trajsel::trajectory {

enum class TrajectoryKind { Current, Best };

std::string_view to_string(TrajectoryKind kind);
/// "current" or "best"; throws DomainError otherwise.
TrajectoryKind kind_from_string(std::string_view name);

/// A fitness time series logged by one run. `source` is a solver name or "ALL".
struct Trajectory {
  std::vector<double> values;
  TrajectoryKind kind = TrajectoryKind::Current;
  std::string source;
  int function_id = 0;
  int instance_id = 0;
  int run_index = 0;
  std::uint64_t run_seed = 0;
};

/// Trajectory of the requested kind taken from a solver log.
Trajectory from_run(const solvers::RunResult& run, TrajectoryKind kind, std::string source, int function_id,
                    int instance_id, int run_index);

/// Prefix minimum. Idempotent on Best input.
Trajectory to_best(const Trajectory& t);
/// First n values; 1 <= n <= size.
Trajectory truncate(const Trajectory& t, std::size_t n);
/// Joins one trajectory per portfolio solver (CMAES, DE, PSO order) into an
/// "ALL" series. Parts must agree on kind, function, instance and run index.
Trajectory concat_all(std::span<const Trajectory> parts);

}  // namespace trajsel::trajectory
