#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "trajsel/solvers/labeling.hpp"
#include "trajsel/trajectory/cross_validation.hpp"
#include "trajsel/trajectory/dataset.hpp"
#include "trajsel/trajectory/probes.hpp"
#include "trajsel/tuner/tuner.hpp"

namespace trajsel::tuner {

/// One of the eight probe-tuning tasks plus the data it is measured on.
/// Evaluation unit j is LOIO fold (j mod I) of probe data replicate (j div I).
struct TuneTask {
  trajectory::Task objective;
  trajectory::TrajectoryKind kind = trajectory::TrajectoryKind::Best;
  trajectory::Suite suite;
  int data_reps = 2;
  std::vector<solvers::PortfolioLabel> labels;
  std::uint64_t seed = 0;
  trajectory::ModelSettings model;

  std::size_t n_units() const { return suite.instances.size() * static_cast<std::size_t>(data_reps); }
  /// Throws DomainError when the task cannot be evaluated.
  void validate() const;
};

/// Seed of the probe data replicate a unit belongs to.
std::uint64_t replicate_seed(const TuneTask& task, int rep);

/// 1 - LOIO accuracy (classification) or LOIO RMSE (regression) on the unit's fold.
double objective_cost(const SAConfig& config, const TuneTask& task, std::size_t unit);

/// objective_cost with the probe datasets of each (config, replicate) kept in memory.
class Objective {
 public:
  explicit Objective(TuneTask task);
  double operator()(const SAConfig& config, std::size_t unit);
  const TuneTask& task() const { return task_; }

 private:
  std::shared_ptr<const trajectory::LabeledDataset> dataset(const SAConfig& config, int rep);

  TuneTask task_;
  std::map<std::pair<std::array<double, 4>, int>, std::shared_ptr<const trajectory::LabeledDataset>> cache_;
  std::mutex mutex_;
};

/// Iterated racing over `task` with the experiment budget.
TuneResult tune_task(const TuneTask& task, long budget, std::uint64_t seed);

}  // namespace trajsel::tuner
