#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajsel/features/features.hpp"
#include "trajsel/models/matrix.hpp"
#include "trajsel/solvers/labeling.hpp"
#include "trajsel/trajectory/trajectory.hpp"

namespace trajsel::trajectory {

enum class TaskKind { Classification, Regression };

/// Classification of the best solver, or regression of one solver's median final precision.
struct Task {
  TaskKind kind = TaskKind::Classification;
  solvers::SolverId target = solvers::SolverId::CMAES;

  bool operator==(const Task&) const = default;
};

/// "classification" or "regression-CMAES" / "regression-DE" / "regression-PSO".
std::string to_string(const Task& task);
Task task_from_string(std::string_view name);

enum class Modality { Raw, TSFeatures, TSFeaturesSelected, ELA };

/// "raw", "ts", "ts-selected", "ela".
std::string_view to_string(Modality m);
Modality modality_from_string(std::string_view name);

struct DatasetRow {
  int function_id = 0;
  int instance_id = 0;
  int run_index = 0;
  std::uint64_t run_seed = 0;
  std::vector<double> input;
  int label = -1;      // portfolio index of the best solver (classification)
  double target = 0.0;  // median final precision (regression)
};

struct LabeledDataset {
  Task task;
  Modality modality = Modality::Raw;
  std::vector<std::string> names;  // input column names
  std::vector<DatasetRow> rows;

  std::size_t width() const { return names.size(); }
  int fold_of(std::size_t row) const { return rows[row].instance_id; }
  models::Matrix inputs(std::span<const std::size_t> idx) const;
  std::vector<int> labels(std::span<const std::size_t> idx) const;
  std::vector<double> targets(std::span<const std::size_t> idx) const;
};

/// One row per trajectory. TS modalities carry all 22 series features;
/// selection for TSFeaturesSelected happens per training fold.
LabeledDataset assemble_dataset(std::span<const Trajectory> trajectories, std::span<const solvers::PortfolioLabel> labels,
                                const Task& task, Modality modality);

struct ElaRecord {
  int function_id = 0;
  int instance_id = 0;
  int sample_index = 0;
  std::uint64_t seed = 0;
  features::FeatureVector features;
};

/// One row per sampled landscape feature vector.
LabeledDataset assemble_ela_dataset(std::span<const ElaRecord> records, std::span<const solvers::PortfolioLabel> labels,
                                    const Task& task);

struct Fold {
  int instance_id = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Leave-one-instance-out folds in increasing instance order.
std::vector<Fold> loio_folds(const LabeledDataset& ds);

/// Header row_id,function_id,instance_id,run_seed,fold,label_or_target,<names...>.
std::string to_csv(const LabeledDataset& ds);

}  // namespace trajsel::trajectory
