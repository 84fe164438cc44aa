#include "trajsel/tuner/objective.hpp"

#include <set>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"

namespace trajsel::tuner {

void TuneTask::validate() const {
  if (suite.functions.empty()) throw DomainError("tuning task has no functions");
  if (suite.instances.size() < 2) throw DomainError("tuning task needs at least two instances for LOIO folds");
  if (suite.runs < 1 || data_reps < 1) throw DomainError("tuning task needs runs and replicates >= 1");
  if (model.n_trees < 1) throw DomainError("tuning task needs at least one tree");
  if (objective.kind == trajectory::TaskKind::Regression && objective.target == solvers::SolverId::SA)
    throw DomainError("regression target must be a portfolio solver");
  std::set<std::pair<int, int>> have;
  for (const auto& l : labels) have.insert({l.function_id, l.instance_id});
  for (int f : suite.functions)
    for (int i : suite.instances)
      if (!have.count({f, i})) throw ConsistencyError("tuning task lacks a label for function " + std::to_string(f));
}

std::uint64_t replicate_seed(const TuneTask& task, int rep) {
  return derive_seed(task.seed, "replicate", {static_cast<std::uint64_t>(rep)});
}

namespace {

trajectory::LabeledDataset build_dataset(const SAConfig& config, const TuneTask& task, int rep) {
  const auto probes = trajectory::sa_probes(config, task.suite, task.kind, replicate_seed(task, rep), task.model.jobs);
  return trajectory::assemble_dataset(probes, task.labels, task.objective, trajectory::Modality::Raw);
}

double unit_cost(const trajectory::LabeledDataset& ds, const TuneTask& task, std::size_t unit) {
  const std::size_t n_inst = task.suite.instances.size();
  const auto folds = trajectory::loio_folds(ds);
  const auto& fold = folds.at(unit % n_inst);
  const auto seed = derive_seed(task.seed, "unit-model", {static_cast<std::uint64_t>(unit)});
  const double metric = trajectory::fold_metric(ds, fold, task.model, seed);
  return task.objective.kind == trajectory::TaskKind::Classification ? 1.0 - metric : metric;
}

}  // namespace

double objective_cost(const SAConfig& config, const TuneTask& task, std::size_t unit) {
  if (unit >= task.n_units()) throw DomainError("evaluation unit out of range");
  const int rep = static_cast<int>(unit / task.suite.instances.size());
  return unit_cost(build_dataset(config, task, rep), task, unit);
}

Objective::Objective(TuneTask task) : task_(std::move(task)) { task_.validate(); }

std::shared_ptr<const trajectory::LabeledDataset> Objective::dataset(const SAConfig& config, int rep) {
  const auto key = std::make_pair(ParamSpace::to_vector(config), rep);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto ds = std::make_shared<const trajectory::LabeledDataset>(build_dataset(config, task_, rep));
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(ds)).first->second;
}

double Objective::operator()(const SAConfig& config, std::size_t unit) {
  if (unit >= task_.n_units()) throw DomainError("evaluation unit out of range");
  const int rep = static_cast<int>(unit / task_.suite.instances.size());
  return unit_cost(*dataset(config, rep), task_, unit);
}

TuneResult tune_task(const TuneTask& task, long budget, std::uint64_t seed) {
  Objective objective(task);
  TuneOptions options;
  options.n_units = task.n_units();
  return tune([&](const SAConfig& c, std::size_t u) { return objective(c, u); }, budget, seed, options);
}

}  // namespace trajsel::tuner
