#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "trajsel/trajectory/cross_validation.hpp"
#include "trajsel/trajectory/probes.hpp"

namespace trajsel::pipeline {

/// Settings shared by every command of one experiment.
struct ExperimentConfig {
  std::vector<int> functions;
  std::vector<int> instances = {1, 2, 3, 4, 5};
  int dim = 10;
  int runs = 5;
  std::vector<int> generations = {2, 7};
  long truth_budget = 10000;
  long tuning_budget = 500;
  int data_reps = 2;       // probe replicates per tuning unit set
  int repeats = 5;
  std::uint64_t master_seed = 1;
  int n_trees = 100;
  int selection_iterations = 50;
  int ela_vectors = 5;     // landscape feature vectors per instance
  int ela_budget_factor = 50;  // sample size = factor * dim
  unsigned jobs = 1;
  std::filesystem::path out_dir = "out";

  /// Desk-scale defaults: the full catalog, 5 instances, 5 runs, 10,000
  /// evaluations of ground truth, 500 tuning experiments.
  static ExperimentConfig desk();
  /// Larger budgets: 100,000 ground-truth evaluations and 5,000 experiments.
  static ExperimentConfig paper_scale();

  /// Throws CatalogError for unknown functions, DomainError for bad values.
  void validate() const;
  trajectory::Suite suite() const;
  trajectory::ModelSettings model_settings() const;
};

/// Unknown keys are rejected with UsageError; missing keys keep `base` values.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = ExperimentConfig::desk());
/// Every field except jobs and out_dir, which do not affect results.
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace trajsel::pipeline
