#pragma once

#include <cstdint>

#include "trajsel/features/features.hpp"
#include "trajsel/models/forest.hpp"
#include "trajsel/models/metrics.hpp"
#include "trajsel/trajectory/dataset.hpp"

namespace trajsel::trajectory {

struct ModelSettings {
  int n_trees = 100;
  unsigned jobs = 1;
  features::SelectionOptions selection;
};

/// Forest kind used for a dataset: raw series go to a rotation forest
/// (classification) or time series forest (regression); feature modalities
/// go to a random forest.
models::ForestKind model_for(const LabeledDataset& ds);

/// Trains on the fold's training rows and scores its validation rows:
/// accuracy for classification, RMSE for regression.
double fold_metric(const LabeledDataset& ds, const Fold& fold, const ModelSettings& settings, std::uint64_t seed);

/// All LOIO folds; per-fold seeds are derive_seed(seed, "fold", {instance_id}).
models::Metrics loio_evaluate(const LabeledDataset& ds, const ModelSettings& settings, std::uint64_t seed);

/// Fraction of rows carrying the most frequent label.
double majority_baseline(const LabeledDataset& ds);

}  // namespace trajsel::trajectory
