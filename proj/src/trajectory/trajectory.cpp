#include "trajsel/trajectory/trajectory.hpp"

#include <algorithm>

#include "trajsel/common/errors.hpp"

namespace trajsel::trajectory {

std::string_view to_string(TrajectoryKind kind) { return kind == TrajectoryKind::Best ? "best" : "current"; }

TrajectoryKind kind_from_string(std::string_view name) {
  if (name == "best") return TrajectoryKind::Best;
  if (name == "current") return TrajectoryKind::Current;
  throw DomainError("unknown trajectory kind '" + std::string(name) + "'");
}

Trajectory from_run(const solvers::RunResult& run, TrajectoryKind kind, std::string source, int function_id,
                    int instance_id, int run_index) {
  if (run.current.empty()) throw DomainError("run has no evaluations");
  Trajectory t;
  t.values = kind == TrajectoryKind::Best ? run.best : run.current;
  t.kind = kind;
  t.source = std::move(source);
  t.function_id = function_id;
  t.instance_id = instance_id;
  t.run_index = run_index;
  t.run_seed = run.seed;
  return t;
}

Trajectory to_best(const Trajectory& t) {
  if (t.values.empty()) throw DomainError("empty trajectory");
  Trajectory out = t;
  out.kind = TrajectoryKind::Best;
  for (std::size_t i = 1; i < out.values.size(); ++i) out.values[i] = std::min(out.values[i], out.values[i - 1]);
  return out;
}

Trajectory truncate(const Trajectory& t, std::size_t n) {
  if (n < 1 || n > t.values.size())
    throw DomainError("truncation length " + std::to_string(n) + " outside [1, " + std::to_string(t.values.size()) +
                      "]");
  Trajectory out = t;
  out.values.resize(n);
  return out;
}

Trajectory concat_all(std::span<const Trajectory> parts) {
  if (parts.size() != solvers::kPortfolio.size()) throw DomainError("ALL needs one trajectory per portfolio solver");
  Trajectory out;
  out.kind = parts[0].kind;
  out.source = "ALL";
  out.function_id = parts[0].function_id;
  out.instance_id = parts[0].instance_id;
  out.run_index = parts[0].run_index;
  out.run_seed = parts[0].run_seed;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    if (p.source != solvers::to_string(solvers::kPortfolio[i]))
      throw DomainError("ALL parts must come in CMAES, DE, PSO order");
    if (p.kind != out.kind || p.function_id != out.function_id || p.instance_id != out.instance_id ||
        p.run_index != out.run_index)
      throw DomainError("ALL parts disagree on kind, function, instance or run");
    if (p.values.empty()) throw DomainError("empty trajectory");
    out.values.insert(out.values.end(), p.values.begin(), p.values.end());
  }
  return out;
}

}  // namespace trajsel::trajectory
