#include "trajsel/pipeline/config.hpp"

#include <set>

#include "trajsel/bench/instance.hpp"
#include "trajsel/common/errors.hpp"

namespace trajsel::pipeline {

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig c;
  c.functions = bench::catalog_ids();
  return c;
}

ExperimentConfig ExperimentConfig::paper_scale() {
  ExperimentConfig c = desk();
  c.truth_budget = 100000;
  c.tuning_budget = 5000;
  return c;
}

void ExperimentConfig::validate() const {
  if (functions.empty()) throw DomainError("config lists no functions");
  for (int f : functions) bench::catalog_entry(f);
  if (std::set<int>(functions.begin(), functions.end()).size() != functions.size())
    throw DomainError("config repeats a function id");
  if (instances.empty()) throw DomainError("config lists no instances");
  for (int i : instances)
    if (i < 1) throw DomainError("instance ids start at 1");
  if (std::set<int>(instances.begin(), instances.end()).size() != instances.size())
    throw DomainError("config repeats an instance id");
  if (dim < 2) throw DomainError("dimension must be >= 2");
  if (runs < 1 || repeats < 1 || data_reps < 1) throw DomainError("runs, repeats and data_reps must be >= 1");
  for (int g : generations)
    if (g < 1) throw DomainError("generation counts must be >= 1");
  if (truth_budget < 1) throw BudgetError("truth budget must be positive");
  if (tuning_budget < 1) throw BudgetError("tuning budget must be positive");
  if (n_trees < 1) throw DomainError("n_trees must be >= 1");
  if (selection_iterations < 10) throw DomainError("selection needs >= 10 iterations");
  if (ela_vectors < 1 || ela_budget_factor < 1) throw DomainError("landscape sampling settings must be >= 1");
  if (jobs < 1) throw DomainError("jobs must be >= 1");
}

trajectory::Suite ExperimentConfig::suite() const { return {functions, instances, dim, runs}; }

trajectory::ModelSettings ExperimentConfig::model_settings() const {
  trajectory::ModelSettings m;
  m.n_trees = n_trees;
  m.jobs = jobs;
  m.selection.iterations = selection_iterations;
  return m;
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  if (!j.is_object()) throw UsageError("experiment config must be a JSON object");
  static const std::set<std::string> known = {
      "functions",  "instances", "dim",      "runs",     "generations",          "truth_budget",
      "tuning_budget", "data_reps", "repeats", "master_seed", "n_trees",         "selection_iterations",
      "ela_vectors", "ela_budget_factor", "jobs", "out_dir"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw UsageError("unknown config key '" + key + "'");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("functions", c.functions);
    get("instances", c.instances);
    get("dim", c.dim);
    get("runs", c.runs);
    get("generations", c.generations);
    get("truth_budget", c.truth_budget);
    get("tuning_budget", c.tuning_budget);
    get("data_reps", c.data_reps);
    get("repeats", c.repeats);
    get("master_seed", c.master_seed);
    get("n_trees", c.n_trees);
    get("selection_iterations", c.selection_iterations);
    get("ela_vectors", c.ela_vectors);
    get("ela_budget_factor", c.ela_budget_factor);
    get("jobs", c.jobs);
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad config value: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"functions", c.functions},
          {"instances", c.instances},
          {"dim", c.dim},
          {"runs", c.runs},
          {"generations", c.generations},
          {"truth_budget", c.truth_budget},
          {"tuning_budget", c.tuning_budget},
          {"data_reps", c.data_reps},
          {"repeats", c.repeats},
          {"master_seed", c.master_seed},
          {"n_trees", c.n_trees},
          {"selection_iterations", c.selection_iterations},
          {"ela_vectors", c.ela_vectors},
          {"ela_budget_factor", c.ela_budget_factor}};
}

}  // namespace trajsel::pipeline
