#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "trajsel/common/errors.hpp"
#include "trajsel/tuner/tuner.hpp"

using namespace trajsel;
using namespace trajsel::tuner;

namespace {

double planted(const SAConfig& c) { return std::abs(c.n_samples - 50) / 100.0 + std::abs(c.visit - 2.0); }

// Brute-force minimum of the planted cost over a fine grid of (n, visit).
std::pair<int, double> grid_optimum() {
  double best = 1e9;
  std::pair<int, double> arg{0, 0.0};
  for (int n = 5; n <= 100; ++n)
    for (int i = 0; i <= 1000; ++i) {
      const double v = 1.5 + i * 0.001;
      const double c = std::abs(n - 50) / 100.0 + std::abs(v - 2.0);
      if (c < best) {
        best = c;
        arg = {n, v};
      }
    }
  return arg;
}

}  // namespace

TEST_CASE("parameter space bounds") {
  const auto space = ParamSpace::standard();
  CHECK(space.ranges[0].integer);
  CHECK(space.ranges[1].lower == 0.02);
  CHECK(space.ranges[1].upper == 5e4);
  CHECK(space.ranges[2].lower == 1.5);
  CHECK(space.ranges[2].upper == 2.5);
  CHECK(space.ranges[3].lower == -1.1e4);
  CHECK(space.ranges[3].upper == -5);
  CHECK_FALSE(space.contains(solvers::default_sa_config()));  // visit 2.62 sits above the tuning range
  CHECK(space.contains(SAConfig{99, 15912.03, 1.831, -5110.81}));
  CHECK(space.from_vector({4.4, 1e9, 2.0, -3}) == SAConfig{5, 5e4, 2.0, -5});
}

TEST_CASE("candidate sampling") {
  const auto space = ParamSpace::standard();
  RaceState first;
  auto a = sample_candidates(first, space, 10, 3);
  CHECK(a.size() == 10);
  for (const auto& c : a) CHECK(space.contains(c));
  CHECK(a == sample_candidates(first, space, 10, 3));
  CHECK(a != sample_candidates(first, space, 10, 4));
  CHECK_THROWS_AS(sample_candidates(first, space, 1, 3), DomainError);

  RaceState later;
  later.iteration = 5;
  later.elites.push_back({SAConfig{37, 1234.5, 1.9, -700}, {}, 0.0});
  later.spread.fill(0.0);
  for (const auto& c : sample_candidates(later, space, 20, 1)) CHECK(c == later.elites[0].config);
  later.spread.fill(0.3);
  for (const auto& c : sample_candidates(later, space, 200, 2)) CHECK(space.contains(c));
}

TEST_CASE("friedman statistic matches the untied closed form") {
  const std::vector<std::vector<double>> blocks = {{1, 2, 3}, {2, 1, 3}, {1, 3, 2}, {1, 2, 3}};
  // Without ties: 12/(b k (k+1)) sum R^2 - 3 b (k+1).
  const double b = 4, k = 3;
  const double r1 = 1 + 2 + 1 + 1, r2 = 2 + 1 + 3 + 2, r3 = 3 + 3 + 2 + 3;
  const double expected = 12.0 / (b * k * (k + 1)) * (r1 * r1 + r2 * r2 + r3 * r3) - 3 * b * (k + 1);
  CHECK(friedman_statistic(blocks) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(friedman_statistic({{5, 5}, {1, 1}, {2, 2}}) == 0.0);
}

TEST_CASE("race behaviour") {
  std::vector<SAConfig> cands;
  for (int i = 0; i < 6; ++i) cands.push_back(SAConfig{10 + i, 100, 2.0, -5});
  // Candidate 3 is lower on every unit by construction; others are noisy.
  auto cost = [](const SAConfig& c, std::size_t u) {
    if (c.n_samples == 13) return 0.0;
    return 1.0 + std::fmod(0.37 * c.n_samples + 0.91 * u, 1.0);
  };
  RaceOptions opt;
  opt.min_survivors = 1;
  auto r = race(cands, 20, cost, opt);
  CHECK(std::count(r.survivors.begin(), r.survivors.end(), 3) == 1);
  CHECK(r.survivors.size() < cands.size());

  std::vector<SAConfig> twins = {SAConfig{20, 10, 2.0, -5}, SAConfig{20, 10, 2.0, -5}};
  auto same = race(twins, 20, [](const SAConfig&, std::size_t u) { return 0.1 * u; }, opt);
  CHECK(same.survivors.size() == 2);
  CHECK(same.units_used == 20);

  CHECK_THROWS_AS(race(std::vector<SAConfig>{cands[0]}, 20, cost, opt), DomainError);
  CHECK_THROWS_AS(race(cands, 4, cost, opt), ProtocolError);

  RaceOptions tight = opt;
  tight.budget = 13;
  auto limited = race(cands, 20, cost, tight);
  CHECK(limited.experiments <= 13);
  CHECK(limited.units_used == 2);
}

TEST_CASE("tune: budget accounting, bounds and monotone elites") {
  long calls = 0;
  auto cost = [&](const SAConfig& c, std::size_t u) {
    ++calls;
    return planted(c) + 0.01 * static_cast<double>(u % 3);
  };
  auto r = tune(cost, 300, 11);
  CHECK(calls == r.experiments);
  CHECK(static_cast<long>(r.log.size()) == calls);
  CHECK(calls <= 300);
  CHECK(r.elites.size() <= 4);
  CHECK_FALSE(r.elites.empty());
  for (const auto& rec : r.log) CHECK(ParamSpace::standard().contains(rec.config));
  for (std::size_t i = 1; i < r.elite_mean_history.size(); ++i)
    CHECK(r.elite_mean_history[i] <= r.elite_mean_history[i - 1] + 1e-12);
  for (std::size_t i = 1; i < r.elites.size(); ++i) CHECK(r.elites[i - 1].mean_cost <= r.elites[i].mean_cost);
  CHECK_THROWS_AS(tune(cost, 0, 1), DomainError);
  CHECK_THROWS_AS(tune(cost, 49, 1), DomainError);
}

TEST_CASE("tune recovers the planted optimum") {
  const auto [n_opt, v_opt] = grid_optimum();
  REQUIRE(n_opt == 50);
  REQUIRE(v_opt == doctest::Approx(2.0));
  const double default_cost = planted(solvers::default_sa_config());
  int recovered = 0, beats_default = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto r = tune([](const SAConfig& c, std::size_t) { return planted(c); }, 300, seed);
    const auto& best = r.elites.at(0).config;
    recovered += std::abs(best.n_samples - n_opt) <= 10 && std::abs(best.visit - v_opt) <= 0.2;
    beats_default += planted(best) < default_cost;
  }
  CHECK(recovered >= 95);
  CHECK(beats_default >= 95);
}

TEST_CASE("tune is deterministic and logs serialize") {
  auto cost = [](const SAConfig& c, std::size_t u) { return planted(c) + 0.001 * u; };
  auto a = tune(cost, 120, 5), b = tune(cost, 120, 5);
  CHECK(audit_jsonl(a.log) == audit_jsonl(b.log));
  const auto lines = audit_jsonl(a.log);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == static_cast<long>(a.log.size()));
  auto first = nlohmann::json::parse(lines.substr(0, lines.find('\n')));
  CHECK(first.contains("unit_seed"));
  CHECK(first.at("config").contains("acceptance"));
  auto ej = elites_json(a.elites);
  auto back = configs_from_elites_json(nlohmann::json::parse(ej.dump()));
  REQUIRE(back.size() == a.elites.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == a.elites[i].config);
  CHECK(ej[0].at("rank") == 1);
}
