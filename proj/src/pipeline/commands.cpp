#include "trajsel/pipeline/commands.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <set>
#include <sstream>

#include "trajsel/bench/instance.hpp"
#include "trajsel/bench/sampling.hpp"
#include "trajsel/common/errors.hpp"
#include "trajsel/common/parallel.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/common/stats.hpp"
#include "trajsel/features/features.hpp"
#include "trajsel/pipeline/archive.hpp"
#include "trajsel/trajectory/cross_validation.hpp"
#include "trajsel/trajectory/probes.hpp"
#include "trajsel/tuner/objective.hpp"

namespace trajsel::pipeline {

using solvers::format_double;
using trajectory::Task;
using trajectory::TaskKind;
using trajectory::TrajectoryKind;

namespace {

std::uint64_t u64(long v) { return static_cast<std::uint64_t>(v); }

std::uint64_t task_code(const Task& t) {
  return t.kind == TaskKind::Classification ? 0 : 1 + solvers::portfolio_index(t.target);
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

}  // namespace

LabelSummary cmd_gen_labels(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::pair<int, int>> pairs;
  for (int f : config.functions)
    for (int i : config.instances) pairs.push_back({f, i});
  LabelSummary out;
  out.labels.resize(pairs.size());
  parallel_for(pairs.size(), config.jobs, [&](std::size_t k) {
    const auto [f, i] = pairs[k];
    out.labels[k] = solvers::label_portfolio(bench::make_instance(f, i, config.dim), config.runs, config.truth_budget,
                                             derive_seed(config.master_seed, "labels", {u64(f), u64(i)}));
  });
  for (const auto& l : out.labels) ++out.counts[solvers::portfolio_index(l.best_solver)];
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : out.labels) arr.push_back(solvers::to_json(l));
  const nlohmann::json doc = {{"dim", config.dim},
                              {"runs", config.runs},
                              {"truth_budget", config.truth_budget},
                              {"labels", arr}};
  out.file = config.out_dir / "labels.json";
  write_file(out.file, doc.dump(2) + "\n");
  write_manifest(config.out_dir, config);
  return out;
}

std::vector<solvers::PortfolioLabel> load_labels(const ExperimentConfig& config) {
  const auto path = config.out_dir / "labels.json";
  if (!fs::exists(path)) throw FileError("no labels file at " + path.string());
  const auto doc = read_json(path);
  std::vector<solvers::PortfolioLabel> labels;
  try {
    if (doc.at("dim").get<int>() != config.dim || doc.at("runs").get<int>() != config.runs ||
        doc.at("truth_budget").get<long>() != config.truth_budget)
      throw ConsistencyError("labels file was generated with different settings");
    for (const auto& j : doc.at("labels")) labels.push_back(solvers::label_from_json(j));
  } catch (const nlohmann::json::exception& e) {
    throw FileError("malformed labels file: " + std::string(e.what()));
  }
  std::set<std::pair<int, int>> have;
  for (const auto& l : labels) have.insert({l.function_id, l.instance_id});
  for (int f : config.functions)
    for (int i : config.instances)
      if (!have.count({f, i}))
        throw ConsistencyError("labels file lacks function " + std::to_string(f) + " instance " + std::to_string(i));
  return labels;
}

std::vector<solvers::PortfolioLabel> ensure_labels(const ExperimentConfig& config) {
  if (fs::exists(config.out_dir / "labels.json")) return load_labels(config);
  return cmd_gen_labels(config).labels;
}

ProbeSource parse_source(std::string_view spec) {
  ProbeSource s;
  const auto name = upper(spec);
  if (name == "CMAES" || name == "DE" || name == "PSO") {
    s.kind = ProbeSource::Kind::Portfolio;
    s.solver = solvers::solver_from_string(name);
    s.name = name;
  } else if (name == "ALL") {
    s.kind = ProbeSource::Kind::All;
    s.name = "ALL";
  } else if (name == "SA") {
    s.config = solvers::default_sa_config();
    s.name = "SA-default";
  } else if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
    const fs::path path(spec);
    if (!fs::exists(path)) throw FileError("no configuration file at " + path.string());
    try {
      s.config = tuner::configs_from_elites_json(read_json(path)).at(0);
    } catch (const nlohmann::json::exception& e) {
      throw FileError("malformed configuration file " + path.string() + ": " + e.what());
    }
    s.name = "SA-" + path.stem().string();
  } else {
    throw DomainError("unknown probe source '" + std::string(spec) + "'");
  }
  return s;
}

std::vector<trajectory::Trajectory> make_probes(const ProbeSource& source, const ExperimentConfig& config,
                                                TrajectoryKind kind, int generations, std::uint64_t seed) {
  const auto suite = config.suite();
  switch (source.kind) {
    case ProbeSource::Kind::Portfolio:
      return trajectory::portfolio_probes(source.solver, generations, suite, kind, seed, config.jobs);
    case ProbeSource::Kind::All:
      return trajectory::all_probes(generations, suite, kind, seed, config.jobs);
    case ProbeSource::Kind::SA:
      return trajectory::sa_probes(source.config, suite, kind, seed, config.jobs);
  }
  throw DomainError("unknown probe source");
}

fs::path cmd_gen_trajectories(const ExperimentConfig& config, std::string_view source_spec, TrajectoryKind kind,
                              int generations) {
  config.validate();
  const auto source = parse_source(source_spec);
  const auto probes = make_probes(source, config, kind, generations, derive_seed(config.master_seed, "trajectories"));
  std::ostringstream csv;
  csv << "function_id,instance_id,run,run_seed";
  const std::size_t length = probes.at(0).values.size();
  for (std::size_t i = 0; i < length; ++i) csv << ",v" << i;
  csv << '\n';
  for (const auto& t : probes) {
    csv << t.function_id << ',' << t.instance_id << ',' << t.run_index << ',' << t.run_seed;
    for (double v : t.values) csv << ',' << format_double(v);
    csv << '\n';
  }
  const auto path = config.out_dir / "trajectories" /
                    (source.name + "_" + std::string(trajectory::to_string(kind)) + "_" + std::to_string(length) + ".csv");
  write_file(path, csv.str());
  write_manifest(config.out_dir, config);
  return path;
}

fs::path tuned_file(const ExperimentConfig& config, const Task& task, TrajectoryKind kind, int repeat) {
  return config.out_dir / "tuned" /
         (trajectory::to_string(task) + "_" + std::string(trajectory::to_string(kind)) + "_r" + std::to_string(repeat) +
          ".json");
}

TuneOutcome cmd_tune(const ExperimentConfig& config, const Task& task, TrajectoryKind kind, long budget, int repeat) {
  config.validate();
  if (repeat < 0) throw DomainError("repeat index must be >= 0");
  tuner::TuneTask tt;
  tt.objective = task;
  tt.kind = kind;
  tt.suite = config.suite();
  tt.data_reps = config.data_reps;
  tt.labels = ensure_labels(config);
  tt.model = config.model_settings();
  const std::initializer_list<std::uint64_t> key = {task_code(task), kind == TrajectoryKind::Best ? 1u : 0u,
                                                    u64(repeat)};
  tt.seed = derive_seed(config.master_seed, "tune-data", key);
  TuneOutcome out;
  out.result = tuner::tune_task(tt, budget, derive_seed(config.master_seed, "tune", key));
  const nlohmann::json doc = {{"task", trajectory::to_string(task)},
                              {"kind", trajectory::to_string(kind)},
                              {"repeat", repeat},
                              {"budget", budget},
                              {"experiments", out.result.experiments},
                              {"iterations", out.result.iterations},
                              {"elites", tuner::elites_json(out.result.elites)}};
  out.elites_file = tuned_file(config, task, kind, repeat);
  out.audit_file = out.elites_file;
  out.audit_file.replace_extension(".audit.jsonl");
  write_file(out.audit_file, tuner::audit_jsonl(out.result.log));
  write_file(out.elites_file, doc.dump(2) + "\n");
  write_manifest(config.out_dir, config);
  return out;
}

namespace {

std::string model_name(models::ForestKind k) {
  switch (k) {
    case models::ForestKind::RotationForest: return "rotation-forest";
    case models::ForestKind::TimeSeriesForest: return "tsf";
    case models::ForestKind::RFClassifier: return "rf-classifier";
    case models::ForestKind::RFRegressor: return "rf-regressor";
  }
  return "?";
}

trajectory::LabeledDataset ela_dataset(const ExperimentConfig& config, const std::vector<solvers::PortfolioLabel>& labels,
                                       const Task& task, int repeat) {
  std::vector<trajectory::ElaRecord> records;
  for (int f : config.functions)
    for (int i : config.instances) records.push_back({f, i, 0, 0, {}});
  std::vector<trajectory::ElaRecord> all(records.size() * static_cast<std::size_t>(config.ela_vectors));
  const auto per = static_cast<std::size_t>(config.ela_vectors);
  const int k_samples = config.ela_budget_factor * config.dim;
  parallel_for(all.size(), config.jobs, [&](std::size_t n) {
    const auto& base = records[n / per];
    auto& r = all[n];
    r = base;
    r.sample_index = static_cast<int>(n % per);
    r.seed = derive_seed(config.master_seed, "ela",
                         {u64(repeat), u64(base.function_id), u64(base.instance_id), u64(r.sample_index)});
    const auto p = bench::make_instance(base.function_id, base.instance_id, config.dim);
    bench::EvalBudget budget(k_samples);
    const auto samples = bench::low_discrepancy_sample(p, k_samples, r.seed, budget);
    r.features = features::ela_features(samples);
  });
  return trajectory::assemble_ela_dataset(all, labels, task);
}

EvaluateOutcome evaluate_impl(const ExperimentConfig& config, const EvaluateRequest& req, const std::string& stem,
                              const std::string& provenance) {
  config.validate();
  if (req.repeat < 0) throw DomainError("repeat index must be >= 0");
  const auto labels = ensure_labels(config);
  trajectory::LabeledDataset ds;
  if (req.modality == trajectory::Modality::ELA) {
    ds = ela_dataset(config, labels, req.task, req.repeat);
  } else {
    const auto source = parse_source(req.source);
    const auto probes =
        make_probes(source, config, req.kind, req.generations, derive_seed(config.master_seed, "evaluate", {u64(req.repeat)}));
    ds = trajectory::assemble_dataset(probes, labels, req.task, req.modality);
  }
  const auto expected = model_name(trajectory::model_for(ds));
  if (req.model != "auto" && req.model != expected)
    throw UsageError("model '" + req.model + "' does not fit modality " + std::string(trajectory::to_string(req.modality)) +
                     " (expected " + expected + ")");

  EvaluateOutcome out;
  out.metrics = trajectory::loio_evaluate(ds, config.model_settings(),
                                          derive_seed(config.master_seed, "evaluate-model", {u64(req.repeat)}));
  out.majority_baseline = trajectory::majority_baseline(ds);
  out.rows = ds.rows.size();
  const auto folds = trajectory::loio_folds(ds);
  out.folds = folds.size();
  out.train_rows = folds[0].train.size();
  out.validation_rows = folds[0].validation.size();
  std::vector<int> instances;
  for (const auto& f : folds) instances.push_back(f.instance_id);
  out.file = config.out_dir / "metrics" / (stem + ".csv");
  write_file(out.file, metrics_csv(out.metrics, instances, provenance));
  write_manifest(config.out_dir, config);
  return out;
}

}  // namespace

EvaluateOutcome cmd_evaluate(const ExperimentConfig& config, const EvaluateRequest& req) {
  std::string stem = trajectory::to_string(req.task) + "_" + std::string(trajectory::to_string(req.modality));
  if (req.modality != trajectory::Modality::ELA) {
    const auto source = parse_source(req.source);
    stem += "_" + source.name + "_" + std::string(trajectory::to_string(req.kind));
    if (source.kind != ProbeSource::Kind::SA) stem += "_g" + std::to_string(req.generations);
  }
  stem += "_r" + std::to_string(req.repeat);
  return evaluate_impl(config, req, stem, {});
}

EvaluateOutcome cmd_transfer(const ExperimentConfig& config, const fs::path& tuned_config, const Task& target,
                             TrajectoryKind kind, int repeat) {
  if (!fs::exists(tuned_config)) throw FileError("no tuned configuration at " + tuned_config.string());
  EvaluateRequest req;
  req.task = target;
  req.modality = trajectory::Modality::Raw;
  req.source = tuned_config.string();
  req.kind = kind;
  req.repeat = repeat;
  const std::string source = tuned_config.stem().string();
  const std::string stem = "transfer_" + source + "_to_" + trajectory::to_string(target) + "_" +
                           std::string(trajectory::to_string(kind)) + "_r" + std::to_string(repeat);
  return evaluate_impl(config, req, stem, source + "->" + trajectory::to_string(target));
}

std::string metrics_csv(const models::Metrics& m, const std::vector<int>& instances, const std::string& provenance) {
  const std::string metric = m.is_accuracy ? "accuracy" : "rmse";
  const bool prov = !provenance.empty();
  std::ostringstream os;
  os << "row_type,instance_id,metric,value,mean" << (prov ? ",provenance" : "") << '\n';
  for (std::size_t i = 0; i < m.per_fold.size(); ++i) {
    os << "fold," << instances.at(i) << ',' << metric << ',' << format_double(m.per_fold[i]) << ',';
    if (prov) os << ',' << provenance;
    os << '\n';
  }
  os << "aggregate,," << metric << ',' << format_double(m.median) << ',' << format_double(m.mean);
  if (prov) os << ',' << provenance;
  os << '\n';
  return os.str();
}

MetricsFile parse_metrics_csv(const std::string& text) {
  MetricsFile mf;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("row_type,instance_id,metric,value,mean", 0) != 0)
    throw ConsistencyError("not a metrics file");
  bool aggregate = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) throw ConsistencyError("short metrics row");
    try {
      if (cells[0] == "fold") {
        mf.instances.push_back(std::stoi(cells[1]));
        mf.per_fold.push_back(std::stod(cells[3]));
      } else if (cells[0] == "aggregate") {
        if (cells.size() < 5) throw ConsistencyError("aggregate row lacks the mean");
        mf.median = std::stod(cells[3]);
        mf.mean = std::stod(cells[4]);
        aggregate = true;
      } else {
        throw ConsistencyError("unknown metrics row type '" + cells[0] + "'");
      }
    } catch (const std::logic_error&) {
      throw ConsistencyError("unparsable metrics row: " + line);
    }
    mf.metric = cells[2];
  }
  if (!aggregate || mf.per_fold.empty()) throw ConsistencyError("metrics file lacks fold or aggregate rows");
  return mf;
}

ReportOutcome cmd_report(const fs::path& archive) {
  const auto dir = archive / "metrics";
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  if (files.empty()) throw UsageError("archive " + archive.string() + " holds no metrics files");
  std::sort(files.begin(), files.end());

  std::ostringstream csv, table;
  csv << "evaluation,metric,folds,median,mean\n";
  std::size_t width = 10;
  for (const auto& f : files) width = std::max(width, f.stem().string().size());
  table << std::left << std::setw(static_cast<int>(width)) << "evaluation" << "  " << std::setw(8) << "metric"
        << std::right << std::setw(6) << "folds" << std::setw(12) << "median" << std::setw(12) << "mean" << '\n';
  for (const auto& f : files) {
    const auto mf = parse_metrics_csv(read_file(f));
    if (stats::median(mf.per_fold) != mf.median || stats::mean(mf.per_fold) != mf.mean)
      throw ConsistencyError("aggregate row of " + f.filename().string() + " disagrees with its folds");
    csv << f.stem().string() << ',' << mf.metric << ',' << mf.per_fold.size() << ',' << format_double(mf.median) << ','
        << format_double(mf.mean) << '\n';
    table << std::left << std::setw(static_cast<int>(width)) << f.stem().string() << "  " << std::setw(8) << mf.metric
          << std::right << std::setw(6) << mf.per_fold.size() << std::fixed << std::setprecision(4) << std::setw(12)
          << mf.median << std::setw(12) << mf.mean << '\n';
    table.unsetf(std::ios::fixed);
  }
  ReportOutcome out;
  out.rows = files.size();
  out.table = table.str();
  out.summary = archive / "report" / "summary.csv";
  write_file(out.summary, csv.str());
  write_file(archive / "report" / "summary.txt", out.table);
  if (fs::exists(archive / "manifest.json")) {
    auto manifest = read_json(archive / "manifest.json");
    nlohmann::json files_json = nlohmann::json::object();
    for (const auto& e : fs::recursive_directory_iterator(archive)) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), archive).generic_string();
      if (rel != "manifest.json") files_json[rel] = sha256_hex(read_file(e.path()));
    }
    manifest["files"] = files_json;
    write_file(archive / "manifest.json", manifest.dump(2) + "\n");
  }
  return out;
}

std::string cmd_list_functions() {
  std::ostringstream os;
  os << "id,name,group,rotated\n";
  for (const auto& e : bench::catalog()) os << e.id << ',' << e.name << ',' << e.group << ',' << (e.rotated ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace trajsel::pipeline
