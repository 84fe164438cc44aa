#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "doctest.h"
#include "trajsel/common/errors.hpp"
#include "trajsel/common/stats.hpp"
#include "trajsel/pipeline/archive.hpp"
#include "trajsel/pipeline/commands.hpp"
#include "trajsel/pipeline/config.hpp"

using namespace trajsel;
using namespace trajsel::pipeline;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("trajsel_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small(const std::string& name) {
  ExperimentConfig c = ExperimentConfig::desk();
  c.functions = {1, 6, 21};
  c.instances = {1, 2, 3};
  c.runs = 2;
  c.truth_budget = 1200;
  c.n_trees = 10;
  c.repeats = 1;
  c.out_dir = scratch(name);
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("sha256 test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("experiment config parsing and validation") {
  const auto desk = ExperimentConfig::desk();
  CHECK(desk.functions.size() == 12);
  CHECK(desk.dim == 10);
  CHECK(desk.truth_budget == 10000);
  CHECK(desk.tuning_budget == 500);
  CHECK(desk.repeats == 5);
  CHECK(ExperimentConfig::paper_scale().truth_budget == 100000);
  CHECK(ExperimentConfig::paper_scale().tuning_budget == 5000);

  auto c = config_from_json(nlohmann::json{{"functions", {1, 2}}, {"runs", 3}, {"master_seed", 9}});
  CHECK(c.functions == std::vector<int>{1, 2});
  CHECK(c.runs == 3);
  CHECK(c.master_seed == 9);
  CHECK(config_from_json(to_json(c)).master_seed == 9);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"funtions", {1}}}), UsageError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"runs", "many"}}), UsageError);
  c.functions = {4};
  CHECK_THROWS_AS(c.validate(), CatalogError);
}

TEST_CASE("gen-labels") {
  auto c = small("labels");
  c.functions = {1};
  c.instances = {2};
  auto one = cmd_gen_labels(c);
  CHECK(one.labels.size() == 1);
  CHECK(one.counts[0] + one.counts[1] + one.counts[2] == 1);
  CHECK(load_labels(c).size() == 1);

  auto c3 = small("labels3");
  auto s = cmd_gen_labels(c3);
  CHECK(s.counts[0] + s.counts[1] + s.counts[2] == static_cast<int>(c3.functions.size() * c3.instances.size()));

  auto poor = small("labels_poor");
  poor.truth_budget = 39;  // below one PSO generation (40 particles)
  CHECK_THROWS_AS(cmd_gen_labels(poor), BudgetError);
  CHECK_FALSE(fs::exists(poor.out_dir / "labels.json"));
  CHECK_THROWS_AS(load_labels(poor), FileError);
}

TEST_CASE("gen-trajectories lengths") {
  auto c = small("traj");
  auto read_width = [](const fs::path& p) {
    std::istringstream in(read_file(p));
    std::string header;
    std::getline(in, header);
    return static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) - 3;
  };
  CHECK(read_width(cmd_gen_trajectories(c, "CMAES", trajectory::TrajectoryKind::Best, 2)) == 20);
  CHECK(read_width(cmd_gen_trajectories(c, "PSO", trajectory::TrajectoryKind::Current, 7)) == 280);
  CHECK(read_width(cmd_gen_trajectories(c, "ALL", trajectory::TrajectoryKind::Best, 2)) == 160);
  const auto sa = cmd_gen_trajectories(c, "SA", trajectory::TrajectoryKind::Current, 2);
  CHECK(read_width(sa) == 100);
  CHECK(count_lines(read_file(sa)) == 1 + 3 * 3 * 2);
  CHECK_THROWS_AS(cmd_gen_trajectories(c, "NELDER", trajectory::TrajectoryKind::Best, 2), DomainError);
}

TEST_CASE("the eight tuning tasks") {
  std::set<std::string> names;
  for (auto t : {"classification", "regression-CMAES", "regression-PSO", "regression-DE"})
    for (auto k : {"current", "best"})
      names.insert(trajectory::to_string(trajectory::task_from_string(t)) + "/" +
                   std::string(trajectory::to_string(trajectory::kind_from_string(k))));
  CHECK(names.size() == 8);
}

TEST_CASE("tune writes at most four elites") {
  auto c = small("tune");
  auto out = cmd_tune(c, trajectory::Task{}, trajectory::TrajectoryKind::Best, 50, 0);
  const auto doc = read_json(out.elites_file);
  CHECK(doc.at("elites").size() <= 4);
  CHECK(doc.at("elites").size() >= 1);
  CHECK(doc.at("experiments").get<long>() <= 50);
  CHECK(count_lines(read_file(out.audit_file)) == static_cast<std::size_t>(doc.at("experiments").get<long>()));
  for (const auto& cfg : tuner::configs_from_elites_json(doc)) CHECK(tuner::ParamSpace::standard().contains(cfg));
}

TEST_CASE("evaluate, transfer and report") {
  auto c = small("eval");
  EvaluateRequest req;
  req.task = trajectory::Task{};
  req.source = "SA";
  auto e = cmd_evaluate(c, req);
  CHECK(e.folds == c.instances.size());
  CHECK(e.rows == 3u * 3u * 2u);
  CHECK(e.train_rows == 12);
  CHECK(e.validation_rows == 6);
  const auto text = read_file(e.file);
  CHECK(count_lines(text) == 1 + e.folds + 1);
  const auto mf = parse_metrics_csv(text);
  CHECK(mf.per_fold.size() == e.folds);
  CHECK(mf.median == stats::median(mf.per_fold));
  CHECK(mf.mean == stats::mean(mf.per_fold));

  EvaluateRequest wrong = req;
  wrong.model = "tsf";
  CHECK_THROWS_AS(cmd_evaluate(c, wrong), UsageError);

  // A config file used as both the evaluation source and the transfer source.
  const auto cfg_file = c.out_dir / "given.json";
  write_file(cfg_file, solvers::to_json(solvers::SAConfig{40, 900.0, 2.1, -50.0}).dump());
  EvaluateRequest direct = req;
  direct.task = trajectory::Task{trajectory::TaskKind::Regression, solvers::SolverId::DE};
  direct.source = cfg_file.string();
  const auto ev = cmd_evaluate(c, direct);
  const auto tr = cmd_transfer(c, cfg_file, direct.task, direct.kind, 0);
  CHECK(ev.metrics.per_fold == tr.metrics.per_fold);
  CHECK(read_file(tr.file).find("provenance") != std::string::npos);
  CHECK_THROWS_AS(cmd_transfer(c, c.out_dir / "missing.json", direct.task, direct.kind, 0), FileError);

  const auto rep = cmd_report(c.out_dir);
  CHECK(rep.rows == 3);
  CHECK(count_lines(read_file(rep.summary)) == 4);
  verify_manifest(c.out_dir);
  CHECK_THROWS_AS(cmd_report(scratch("empty")), UsageError);
}

TEST_CASE("archives are byte-identical across reruns") {
  auto run = [](const std::string& name) {
    auto c = small(name);
    cmd_gen_labels(c);
    cmd_gen_trajectories(c, "DE", trajectory::TrajectoryKind::Current, 2);
    EvaluateRequest req;
    req.task = trajectory::Task{trajectory::TaskKind::Regression, solvers::SolverId::PSO};
    req.modality = trajectory::Modality::TSFeatures;
    cmd_evaluate(c, req);
    return read_json(c.out_dir / "manifest.json");
  };
  const auto a = run("det_a");
  const auto b = run("det_b");
  CHECK(a == b);
  const auto dir = fs::temp_directory_path() / "trajsel_test_det_a";
  verify_manifest(dir);
  write_file(dir / "labels.json", "{}");
  CHECK_THROWS_AS(verify_manifest(dir), ConsistencyError);
}
