#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace trajsel::solvers {

enum class SolverId { CMAES, DE, PSO, SA };

/// Portfolio order; also the labeling tie-break order.
inline constexpr std::array<SolverId, 3> kPortfolio{SolverId::CMAES, SolverId::DE, SolverId::PSO};

std::string_view to_string(SolverId id);
/// Accepts "CMAES", "DE", "PSO", "SA" (case-insensitive); throws DomainError otherwise.
SolverId solver_from_string(std::string_view name);
std::size_t portfolio_index(SolverId id);

/// Per-evaluation log of one solver run.
struct RunResult {
  std::vector<double> current;  // fitness of every evaluation, in order
  std::vector<double> best;     // prefix minimum of current
  double final_best = 0.0;
  std::uint64_t seed = 0;
  long evals_used = 0;
  int restarts = 0;             // CMA-ES degeneracy restarts

  void record(double fitness);
};

/// One row per evaluation: eval_index,current,best.
std::string to_csv(const RunResult& run);
nlohmann::json metadata_json(const RunResult& run, SolverId solver, const nlohmann::json& config);

/// Bit-exact textual form of a double, used by every CSV writer.
std::string format_double(double v);

}  // namespace trajsel::solvers
