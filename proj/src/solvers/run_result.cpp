#include "trajsel/solvers/run_result.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>

#include "trajsel/common/errors.hpp"

namespace trajsel::solvers {

std::string_view to_string(SolverId id) {
  switch (id) {
    case SolverId::CMAES: return "CMAES";
    case SolverId::DE: return "DE";
    case SolverId::PSO: return "PSO";
    case SolverId::SA: return "SA";
  }
  return "?";
}

SolverId solver_from_string(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "CMAES" || up == "CMA-ES") return SolverId::CMAES;
  if (up == "DE") return SolverId::DE;
  if (up == "PSO") return SolverId::PSO;
  if (up == "SA") return SolverId::SA;
  throw DomainError("unknown solver '" + std::string(name) + "'");
}

std::size_t portfolio_index(SolverId id) {
  switch (id) {
    case SolverId::CMAES: return 0;
    case SolverId::DE: return 1;
    case SolverId::PSO: return 2;
    case SolverId::SA: break;
  }
  throw DomainError("SA is not a portfolio solver");
}

void RunResult::record(double fitness) {
  best.push_back(current.empty() ? fitness : std::min(best.back(), fitness));
  current.push_back(fitness);
  final_best = best.back();
  evals_used = static_cast<long>(current.size());
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw DomainError("cannot format number");
  return {buf, end};
}

std::string to_csv(const RunResult& run) {
  std::string out = "eval_index,current,best\n";
  for (std::size_t i = 0; i < run.current.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(run.current[i]);
    out += ',';
    out += format_double(run.best[i]);
    out += '\n';
  }
  return out;
}

nlohmann::json metadata_json(const RunResult& run, SolverId solver, const nlohmann::json& config) {
  return {{"solver", to_string(solver)},
          {"seed", run.seed},
          {"evals_used", run.evals_used},
          {"restarts", run.restarts},
          {"config", config}};
}

}  // namespace trajsel::solvers
