#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trajsel/models/metrics.hpp"
#include "trajsel/pipeline/config.hpp"
#include "trajsel/solvers/labeling.hpp"
#include "trajsel/trajectory/dataset.hpp"
#include "trajsel/tuner/tuner.hpp"

namespace trajsel::pipeline {

namespace fs = std::filesystem;

struct LabelSummary {
  std::vector<solvers::PortfolioLabel> labels;
  std::array<int, 3> counts{};  // best-solver counts in portfolio order
  fs::path file;
};

/// Labels every (function, instance) of the config; writes labels.json only
/// after all records are computed.
LabelSummary cmd_gen_labels(const ExperimentConfig& config);
/// Reads out_dir/labels.json; FileError when absent.
std::vector<solvers::PortfolioLabel> load_labels(const ExperimentConfig& config);
/// load_labels, or cmd_gen_labels when the file does not exist yet.
std::vector<solvers::PortfolioLabel> ensure_labels(const ExperimentConfig& config);

/// Where probe trajectories come from: a portfolio solver, "ALL", the default
/// SA configuration ("SA"), or a JSON file holding a (tuned) SA configuration.
struct ProbeSource {
  enum class Kind { Portfolio, All, SA } kind = Kind::SA;
  solvers::SolverId solver = solvers::SolverId::SA;
  solvers::SAConfig config;
  std::string name;
};
/// DomainError for unknown names, FileError for unreadable config files.
ProbeSource parse_source(std::string_view spec);

std::vector<trajectory::Trajectory> make_probes(const ProbeSource& source, const ExperimentConfig& config,
                                                trajectory::TrajectoryKind kind, int generations, std::uint64_t seed);

/// Writes trajectories/<source>_<kind>_<n>.csv with columns
/// function_id,instance_id,run,run_seed,v0..vK.
fs::path cmd_gen_trajectories(const ExperimentConfig& config, std::string_view source,
                              trajectory::TrajectoryKind kind, int generations);

struct TuneOutcome {
  tuner::TuneResult result;
  fs::path elites_file;
  fs::path audit_file;
};

/// Tunes SA for one task; writes tuned/<task>_<kind>_r<repeat>.json and the audit log.
TuneOutcome cmd_tune(const ExperimentConfig& config, const trajectory::Task& task, trajectory::TrajectoryKind kind,
                     long budget, int repeat);
fs::path tuned_file(const ExperimentConfig& config, const trajectory::Task& task, trajectory::TrajectoryKind kind,
                    int repeat);

struct EvaluateRequest {
  trajectory::Task task;
  trajectory::Modality modality = trajectory::Modality::Raw;
  std::string source = "SA";
  trajectory::TrajectoryKind kind = trajectory::TrajectoryKind::Best;
  int generations = 2;
  std::string model = "auto";  // or rotation-forest, tsf, rf-classifier, rf-regressor
  int repeat = 0;
};

struct EvaluateOutcome {
  models::Metrics metrics;
  double majority_baseline = 0.0;
  std::size_t rows = 0;
  std::size_t folds = 0;
  std::size_t train_rows = 0;       // of the first fold
  std::size_t validation_rows = 0;  // of the first fold
  fs::path file;
};

/// LOIO evaluation; writes metrics/<name>.csv (one row per fold and an aggregate row).
EvaluateOutcome cmd_evaluate(const ExperimentConfig& config, const EvaluateRequest& request);

/// Evaluates probes from a configuration tuned elsewhere on `target`. The
/// metrics file gains a provenance column naming the source configuration.
EvaluateOutcome cmd_transfer(const ExperimentConfig& config, const fs::path& tuned_config,
                             const trajectory::Task& target, trajectory::TrajectoryKind kind, int repeat);

struct ReportOutcome {
  fs::path summary;
  std::string table;
  std::size_t rows = 0;
};

/// Summarizes every metrics file of an archive into report/summary.csv.
ReportOutcome cmd_report(const fs::path& archive);

std::string cmd_list_functions();

/// Per-fold rows and the aggregate row of a metrics CSV.
struct MetricsFile {
  std::vector<int> instances;
  std::vector<double> per_fold;
  std::string metric;
  double median = 0.0;
  double mean = 0.0;
};
std::string metrics_csv(const models::Metrics& m, const std::vector<int>& instances, const std::string& provenance = {});
MetricsFile parse_metrics_csv(const std::string& text);

}  // namespace trajsel::pipeline
