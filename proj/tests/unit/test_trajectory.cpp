#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/trajectory/dataset.hpp"
#include "trajsel/trajectory/trajectory.hpp"

using namespace trajsel;
using namespace trajsel::trajectory;
using solvers::PortfolioLabel;
using solvers::SolverId;

namespace {

Trajectory series(std::vector<double> v, std::string source = "CMAES", int fid = 1, int iid = 1, int run = 0) {
  Trajectory t;
  t.values = std::move(v);
  t.source = std::move(source);
  t.function_id = fid;
  t.instance_id = iid;
  t.run_index = run;
  return t;
}

struct Suite {
  std::vector<Trajectory> trajectories;
  std::vector<PortfolioLabel> labels;
};

Suite synthetic_suite(int functions, int instances, int runs, std::size_t length) {
  Suite s;
  Rng rng(3);
  for (int f = 1; f <= functions; ++f)
    for (int i = 1; i <= instances; ++i) {
      PortfolioLabel l;
      l.function_id = f;
      l.instance_id = i;
      l.median_final = {f * 1.0 + i, f * 2.0, f * 3.0};
      l.best_solver = solvers::kPortfolio[f % 3];
      s.labels.push_back(l);
      for (int r = 0; r < runs; ++r) {
        std::vector<double> v(length);
        for (auto& x : v) x = rng.uniform(0, 10);
        s.trajectories.push_back(series(v, "SA", f, i, r));
      }
    }
  return s;
}

}  // namespace

TEST_CASE("to_best prefix minimum and idempotence") {
  CHECK(to_best(series({3, 1, 2})).values == std::vector<double>{3, 1, 1});
  CHECK(to_best(series({5, 4, 4, 1})).values == std::vector<double>{5, 4, 4, 1});
  CHECK(to_best(series({3, 1, 2})).kind == TrajectoryKind::Best);
  CHECK_THROWS_AS(to_best(series({})), DomainError);
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> v(30);
    for (auto& x : v) x = rng.normal();
    const auto once = to_best(series(v));
    CHECK(to_best(once).values == once.values);
  }
}

TEST_CASE("truncate") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  auto t = series(v, "DE", 7, 3, 2);
  CHECK(truncate(t, 100).values == v);
  auto five = truncate(t, 5);
  CHECK(five.values == std::vector<double>{0, 1, 2, 3, 4});
  CHECK(five.function_id == 7);
  CHECK(five.source == "DE");
  CHECK_THROWS_AS(truncate(t, 0), DomainError);
  CHECK_THROWS_AS(truncate(t, 101), DomainError);
}

TEST_CASE("concat_all lengths follow the per-solver generation sizes") {
  for (int gens : {2, 7}) {
    std::vector<Trajectory> parts = {series(std::vector<double>(10 * gens, 1.0), "CMAES"),
                                     series(std::vector<double>(30 * gens, 2.0), "DE"),
                                     series(std::vector<double>(40 * gens, 3.0), "PSO")};
    auto all = concat_all(parts);
    CHECK(all.values.size() == static_cast<std::size_t>(80 * gens));
    CHECK(all.source == "ALL");
    CHECK(all.values[10 * gens] == 2.0);
  }
  std::vector<Trajectory> bad = {series({1, 2, 3}, "CMAES", 1, 1), series({1, 2}, "DE", 1, 2), series({1}, "PSO", 1, 1)};
  CHECK_THROWS_AS(concat_all(bad), DomainError);
  std::vector<Trajectory> order = {series({1}, "DE"), series({1}, "CMAES"), series({1}, "PSO")};
  CHECK_THROWS_AS(concat_all(order), DomainError);
}

TEST_CASE("dataset rows and LOIO fold sizes") {
  struct Case {
    int s, i, r;
    std::size_t train, val;
  };
  for (auto c : {Case{24, 5, 5, 480, 120}, Case{12, 5, 5, 240, 60}, Case{3, 4, 2, 18, 6}}) {
    auto suite = synthetic_suite(c.s, c.i, c.r, 8);
    auto ds = assemble_dataset(suite.trajectories, suite.labels, Task{}, Modality::Raw);
    CHECK(ds.rows.size() == static_cast<std::size_t>(c.s * c.i * c.r));
    auto folds = loio_folds(ds);
    REQUIRE(folds.size() == static_cast<std::size_t>(c.i));
    std::vector<int> seen(ds.rows.size(), 0);
    for (const auto& f : folds) {
      CHECK(f.train.size() == c.train);
      CHECK(f.validation.size() == c.val);
      for (auto v : f.validation) {
        ++seen[v];
        CHECK(ds.fold_of(v) == f.instance_id);
      }
      std::set<std::size_t> tr(f.train.begin(), f.train.end());
      for (auto v : f.validation) CHECK(tr.count(v) == 0);
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; }));
  }
}

TEST_CASE("regression targets project the labeled solver") {
  auto suite = synthetic_suite(4, 3, 2, 5);
  auto ds = assemble_dataset(suite.trajectories, suite.labels, Task{TaskKind::Regression, SolverId::CMAES},
                             Modality::TSFeatures);
  CHECK(ds.width() == 22);
  for (const auto& row : ds.rows) CHECK(row.target == row.function_id * 1.0 + row.instance_id);
  auto cls = assemble_dataset(suite.trajectories, suite.labels, Task{}, Modality::Raw);
  for (const auto& row : cls.rows) CHECK(row.label == row.function_id % 3);
}

TEST_CASE("dataset errors") {
  auto suite = synthetic_suite(2, 1, 2, 5);
  auto ds = assemble_dataset(suite.trajectories, suite.labels, Task{}, Modality::Raw);
  CHECK_THROWS_AS(loio_folds(ds), DomainError);
  suite.labels.pop_back();
  CHECK_THROWS_AS(assemble_dataset(suite.trajectories, suite.labels, Task{}, Modality::Raw), ConsistencyError);
  auto ragged = synthetic_suite(2, 2, 1, 5);
  ragged.trajectories[1].values.push_back(1.0);
  CHECK_THROWS_AS(assemble_dataset(ragged.trajectories, ragged.labels, Task{}, Modality::Raw), DomainError);
}

TEST_CASE("ELA rows: five per instance") {
  auto suite = synthetic_suite(3, 2, 1, 5);
  std::vector<ElaRecord> recs;
  for (const auto& l : suite.labels)
    for (int k = 0; k < 5; ++k) {
      ElaRecord r;
      r.function_id = l.function_id;
      r.instance_id = l.instance_id;
      r.sample_index = k;
      r.features.names = {"a", "b"};
      r.features.values = {1.0 * k, 2.0};
      recs.push_back(r);
    }
  auto ds = assemble_ela_dataset(recs, suite.labels, Task{});
  CHECK(ds.rows.size() == 30);
  auto folds = loio_folds(ds);
  CHECK(folds.size() == 2);
  CHECK(folds[0].validation.size() == 15);
}

TEST_CASE("task and modality names") {
  CHECK(to_string(task_from_string("regression-PSO")) == "regression-PSO");
  CHECK(task_from_string("Classification") == Task{});
  CHECK_THROWS_AS(task_from_string("regression-SA"), DomainError);
  CHECK_THROWS_AS(task_from_string("ranking"), DomainError);
  CHECK(modality_from_string("ts-selected") == Modality::TSFeaturesSelected);
  CHECK_THROWS_AS(modality_from_string("pixels"), DomainError);
}

TEST_CASE("dataset csv header and row count") {
  auto suite = synthetic_suite(2, 2, 1, 3);
  auto csv = to_csv(assemble_dataset(suite.trajectories, suite.labels, Task{}, Modality::Raw));
  CHECK(csv.rfind("row_id,function_id,instance_id,run_seed,fold,label_or_target,v0,v1,v2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
