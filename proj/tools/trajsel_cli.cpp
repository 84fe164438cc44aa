#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "trajsel/common/errors.hpp"
#include "trajsel/pipeline/archive.hpp"
#include "trajsel/pipeline/commands.hpp"
#include "trajsel/pipeline/config.hpp"
#include "trajsel/trajectory/dataset.hpp"

using namespace trajsel;
using namespace trajsel::pipeline;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFile = 3;
constexpr int kExitDomain = 4;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool paper_scale = false;
  std::optional<unsigned> jobs;
  std::optional<int> repeats;
};

ExperimentConfig load_config(const Globals& g) {
  ExperimentConfig c = g.paper_scale ? ExperimentConfig::paper_scale() : ExperimentConfig::desk();
  if (!g.config_path.empty()) c = config_from_json(read_json(g.config_path), c);
  if (g.seed) c.master_seed = *g.seed;
  if (!g.out.empty()) c.out_dir = g.out;
  if (g.jobs) c.jobs = *g.jobs;
  if (g.repeats) c.repeats = *g.repeats;
  c.validate();
  return c;
}

// Argument parsing failures are usage errors, not domain errors.
template <typename F>
auto parse_arg(const std::string& what, F f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw UsageError("invalid " + what + ": " + e.what());
  }
}

trajectory::Task parse_task(const std::string& s) {
  return parse_arg("task", [&] { return trajectory::task_from_string(s); });
}
trajectory::TrajectoryKind parse_kind(const std::string& s) {
  return parse_arg("trajectory kind", [&] { return trajectory::kind_from_string(s); });
}
trajectory::Modality parse_modality(const std::string& s) {
  return parse_arg("modality", [&] { return trajectory::modality_from_string(s); });
}

void print_metrics(const EvaluateOutcome& e) {
  std::cout << e.file.string() << ": " << (e.metrics.is_accuracy ? "accuracy" : "rmse") << " median "
            << e.metrics.median << " mean " << e.metrics.mean << " over " << e.folds << " folds (" << e.train_rows
            << "/" << e.validation_rows << " rows per fold)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probe-trajectory algorithm selection workbench"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Experiment config JSON");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--paper-scale", g.paper_scale, "Use the large budgets");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--repeats", g.repeats, "Repeated evaluation runs")->check(CLI::PositiveNumber);

  auto* labels = app.add_subcommand("gen-labels", "Label every instance with its best portfolio solver");

  auto* traj = app.add_subcommand("gen-trajectories", "Write probe trajectories as CSV");
  std::string source = "SA", kind = "best";
  int generations = 2;
  traj->add_option("--source", source, "CMAES, DE, PSO, ALL, SA or a tuned config JSON");
  traj->add_option("--kind", kind, "best or current");
  traj->add_option("--generations", generations, "Generations for portfolio sources");

  auto* tune = app.add_subcommand("tune", "Tune the SA probe for one task");
  std::string task = "classification";
  std::optional<long> budget;
  int repeat = 0;
  tune->add_option("--task", task, "classification or regression-{CMAES,DE,PSO}");
  tune->add_option("--kind", kind, "best or current");
  tune->add_option("--budget", budget, "Experiment budget");
  tune->add_option("--repeat", repeat, "Repeat index");

  auto* eval = app.add_subcommand("evaluate", "Leave-one-instance-out evaluation");
  std::string modality = "raw", model = "auto";
  std::optional<int> eval_repeat;
  eval->add_option("--task", task);
  eval->add_option("--modality", modality, "raw, ts, ts-selected or ela");
  eval->add_option("--source", source);
  eval->add_option("--kind", kind);
  eval->add_option("--generations", generations);
  eval->add_option("--model", model, "auto, rotation-forest, tsf, rf-classifier, rf-regressor");
  eval->add_option("--repeat", eval_repeat, "Single repeat index (default: all repeats)");

  auto* transfer = app.add_subcommand("transfer", "Evaluate a tuned probe on another task");
  std::string tuned, target;
  transfer->add_option("--tuned", tuned, "Tuned config JSON")->required();
  transfer->add_option("--target", target, "Target task")->required();
  transfer->add_option("--kind", kind);
  transfer->add_option("--repeat", eval_repeat);

  auto* report = app.add_subcommand("report", "Summarize the metrics of an archive");
  std::string archive;
  report->add_option("--archive", archive, "Archive directory (default: --out)");

  auto* list = app.add_subcommand("list-functions", "Print the function catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (list->parsed()) {
      std::cout << cmd_list_functions();
      return 0;
    }
    const auto config = load_config(g);
    if (labels->parsed()) {
      const auto s = cmd_gen_labels(config);
      std::cout << s.file.string() << ": " << s.labels.size() << " records; best solver counts CMAES " << s.counts[0]
                << ", DE " << s.counts[1] << ", PSO " << s.counts[2] << "\n";
    } else if (traj->parsed()) {
      std::cout << cmd_gen_trajectories(config, source, parse_kind(kind), generations).string() << "\n";
    } else if (tune->parsed()) {
      const auto out = cmd_tune(config, parse_task(task), parse_kind(kind), budget.value_or(config.tuning_budget), repeat);
      std::cout << out.elites_file.string() << ": " << out.result.elites.size() << " elites after "
                << out.result.experiments << " experiments\n";
    } else if (eval->parsed()) {
      EvaluateRequest req;
      req.task = parse_task(task);
      req.modality = parse_modality(modality);
      req.source = source;
      req.kind = parse_kind(kind);
      req.generations = generations;
      req.model = model;
      const int first = eval_repeat.value_or(0);
      const int last = eval_repeat ? first + 1 : config.repeats;
      for (int r = first; r < last; ++r) {
        req.repeat = r;
        print_metrics(cmd_evaluate(config, req));
      }
    } else if (transfer->parsed()) {
      const auto target_task = parse_task(target);
      const auto k = parse_kind(kind);
      const int first = eval_repeat.value_or(0);
      const int last = eval_repeat ? first + 1 : config.repeats;
      for (int r = first; r < last; ++r) print_metrics(cmd_transfer(config, tuned, target_task, k, r));
    } else if (report->parsed()) {
      const auto out = cmd_report(archive.empty() ? config.out_dir : std::filesystem::path(archive));
      std::cout << out.table;
    }
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kExitFile;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << "\n";
    return 1;
  }
}
