#include "trajsel/trajectory/cross_validation.hpp"

#include <algorithm>
#include <map>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"

namespace trajsel::trajectory {

models::ForestKind model_for(const LabeledDataset& ds) {
  const bool cls = ds.task.kind == TaskKind::Classification;
  if (ds.modality == Modality::Raw) return cls ? models::ForestKind::RotationForest : models::ForestKind::TimeSeriesForest;
  return cls ? models::ForestKind::RFClassifier : models::ForestKind::RFRegressor;
}

namespace {

models::Matrix keep_columns(const models::Matrix& x, const std::vector<std::size_t>& cols) {
  models::Matrix out(x.rows(), cols.size());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = x(r, cols[c]);
  return out;
}

}  // namespace

double fold_metric(const LabeledDataset& ds, const Fold& fold, const ModelSettings& settings, std::uint64_t seed) {
  if (fold.train.empty() || fold.validation.empty()) throw DomainError("fold has an empty side");
  models::Matrix xtr = ds.inputs(fold.train);
  models::Matrix xva = ds.inputs(fold.validation);
  const bool cls = ds.task.kind == TaskKind::Classification;
  models::ForestOptions fo;
  fo.jobs = settings.jobs;

  if (ds.modality == Modality::TSFeaturesSelected) {
    auto sel_opts = settings.selection;
    sel_opts.jobs = settings.jobs;
    const auto sel_seed = derive_seed(seed, "select");
    const auto mask = cls ? features::select_features(xtr, ds.labels(fold.train), sel_seed, sel_opts)
                          : features::select_features(xtr, ds.targets(fold.train), sel_seed, sel_opts);
    const auto cols = mask.kept_indices();
    xtr = keep_columns(xtr, cols);
    xva = keep_columns(xva, cols);
  }

  const auto model_seed = derive_seed(seed, "model");
  switch (model_for(ds)) {
    case models::ForestKind::RotationForest: {
      const auto m = models::train_rotation_forest(xtr, ds.labels(fold.train), settings.n_trees, model_seed, fo);
      return models::accuracy(m.predict_classes(xva), ds.labels(fold.validation));
    }
    case models::ForestKind::RFClassifier: {
      const auto m = models::train_rf_classifier(xtr, ds.labels(fold.train), settings.n_trees, model_seed, fo);
      return models::accuracy(m.predict_classes(xva), ds.labels(fold.validation));
    }
    case models::ForestKind::TimeSeriesForest: {
      const auto m = models::train_tsf_regressor(xtr, ds.targets(fold.train), settings.n_trees, model_seed, fo);
      return models::rmse(m.predict_values(xva), ds.targets(fold.validation));
    }
    case models::ForestKind::RFRegressor: {
      const auto m = models::train_rf_regressor(xtr, ds.targets(fold.train), settings.n_trees, model_seed, fo);
      return models::rmse(m.predict_values(xva), ds.targets(fold.validation));
    }
  }
  throw DomainError("unknown model kind");
}

models::Metrics loio_evaluate(const LabeledDataset& ds, const ModelSettings& settings, std::uint64_t seed) {
  std::vector<double> per_fold;
  for (const auto& fold : loio_folds(ds))
    per_fold.push_back(
        fold_metric(ds, fold, settings, derive_seed(seed, "fold", {static_cast<std::uint64_t>(fold.instance_id)})));
  return models::Metrics::from_folds(ds.task.kind == TaskKind::Classification, std::move(per_fold));
}

double majority_baseline(const LabeledDataset& ds) {
  if (ds.rows.empty()) throw DomainError("empty dataset");
  std::map<int, std::size_t> counts;
  for (const auto& r : ds.rows) ++counts[r.label];
  std::size_t top = 0;
  for (const auto& [label, n] : counts) top = std::max(top, n);
  return static_cast<double>(top) / static_cast<double>(ds.rows.size());
}

}  // namespace trajsel::trajectory
