#include "trajsel/trajectory/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "trajsel/common/errors.hpp"

namespace trajsel::trajectory {

std::string to_string(const Task& task) {
  if (task.kind == TaskKind::Classification) return "classification";
  return "regression-" + std::string(solvers::to_string(task.target));
}

Task task_from_string(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "classification") return {};
  const std::string prefix = "regression-";
  if (s.rfind(prefix, 0) == 0) {
    const auto solver = solvers::solver_from_string(s.substr(prefix.size()));
    if (solver == solvers::SolverId::SA) throw DomainError("SA is not a portfolio solver");
    return {TaskKind::Regression, solver};
  }
  throw DomainError("unknown task '" + std::string(name) + "'");
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Raw: return "raw";
    case Modality::TSFeatures: return "ts";
    case Modality::TSFeaturesSelected: return "ts-selected";
    case Modality::ELA: return "ela";
  }
  return "?";
}

Modality modality_from_string(std::string_view name) {
  for (auto m : {Modality::Raw, Modality::TSFeatures, Modality::TSFeaturesSelected, Modality::ELA})
    if (to_string(m) == name) return m;
  throw DomainError("unknown input modality '" + std::string(name) + "'");
}

models::Matrix LabeledDataset::inputs(std::span<const std::size_t> idx) const {
  models::Matrix m(idx.size(), width());
  for (std::size_t i = 0; i < idx.size(); ++i) std::copy(rows[idx[i]].input.begin(), rows[idx[i]].input.end(), m.row(i).begin());
  return m;
}

std::vector<int> LabeledDataset::labels(std::span<const std::size_t> idx) const {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = rows[idx[i]].label;
  return out;
}

std::vector<double> LabeledDataset::targets(std::span<const std::size_t> idx) const {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = rows[idx[i]].target;
  return out;
}

namespace {

using LabelIndex = std::map<std::pair<int, int>, const solvers::PortfolioLabel*>;

LabelIndex index_labels(std::span<const solvers::PortfolioLabel> labels) {
  LabelIndex idx;
  for (const auto& l : labels) idx[{l.function_id, l.instance_id}] = &l;
  return idx;
}

void attach_label(DatasetRow& row, const LabelIndex& idx, const Task& task) {
  const auto it = idx.find({row.function_id, row.instance_id});
  if (it == idx.end())
    throw ConsistencyError("no label for function " + std::to_string(row.function_id) + " instance " +
                           std::to_string(row.instance_id));
  row.label = static_cast<int>(solvers::portfolio_index(it->second->best_solver));
  if (task.kind == TaskKind::Regression) row.target = it->second->target(task.target);
}

}  // namespace

LabeledDataset assemble_dataset(std::span<const Trajectory> trajectories, std::span<const solvers::PortfolioLabel> labels,
                                const Task& task, Modality modality) {
  if (modality == Modality::ELA) throw DomainError("landscape features are assembled from samples, not trajectories");
  if (trajectories.empty()) throw DomainError("no trajectories to assemble");
  const auto idx = index_labels(labels);
  LabeledDataset ds;
  ds.task = task;
  ds.modality = modality;
  const std::size_t length = trajectories[0].values.size();
  if (modality == Modality::Raw) {
    for (std::size_t i = 0; i < length; ++i) ds.names.push_back("v" + std::to_string(i));
  } else {
    ds.names = features::ts_feature_names();
  }
  for (const auto& t : trajectories) {
    if (t.values.size() != length) throw DomainError("trajectories of one dataset must share a length");
    DatasetRow row;
    row.function_id = t.function_id;
    row.instance_id = t.instance_id;
    row.run_index = t.run_index;
    row.run_seed = t.run_seed;
    row.input = modality == Modality::Raw ? t.values : features::ts_features(t).values;
    attach_label(row, idx, task);
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

LabeledDataset assemble_ela_dataset(std::span<const ElaRecord> records, std::span<const solvers::PortfolioLabel> labels,
                                    const Task& task) {
  if (records.empty()) throw DomainError("no landscape feature vectors to assemble");
  const auto idx = index_labels(labels);
  LabeledDataset ds;
  ds.task = task;
  ds.modality = Modality::ELA;
  ds.names = records[0].features.names;
  for (const auto& r : records) {
    if (r.features.names != ds.names) throw DomainError("landscape feature vectors disagree on names");
    DatasetRow row;
    row.function_id = r.function_id;
    row.instance_id = r.instance_id;
    row.run_index = r.sample_index;
    row.run_seed = r.seed;
    row.input = r.features.values;
    attach_label(row, idx, task);
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

std::vector<Fold> loio_folds(const LabeledDataset& ds) {
  std::set<int> instances;
  for (const auto& r : ds.rows) instances.insert(r.instance_id);
  if (instances.size() < 2) throw DomainError("leave-one-instance-out needs at least two instances");
  std::vector<Fold> folds;
  for (int inst : instances) {
    Fold f;
    f.instance_id = inst;
    for (std::size_t i = 0; i < ds.rows.size(); ++i) (ds.rows[i].instance_id == inst ? f.validation : f.train).push_back(i);
    folds.push_back(std::move(f));
  }
  return folds;
}

std::string to_csv(const LabeledDataset& ds) {
  std::ostringstream out;
  out << "row_id,function_id,instance_id,run_seed,fold,label_or_target";
  for (const auto& n : ds.names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < ds.rows.size(); ++i) {
    const auto& r = ds.rows[i];
    out << i << ',' << r.function_id << ',' << r.instance_id << ',' << r.run_seed << ',' << r.instance_id << ',';
    if (ds.task.kind == TaskKind::Classification)
      out << solvers::to_string(solvers::kPortfolio[static_cast<std::size_t>(r.label)]);
    else
      out << solvers::format_double(r.target);
    for (double v : r.input) out << ',' << solvers::format_double(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace trajsel::trajectory
