#include "trajsel/tuner/tuner.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/common/stats.hpp"

namespace trajsel::tuner {

namespace {

using Key = std::array<double, 4>;
constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

}  // namespace

ParamSpace ParamSpace::standard() {
  return {{ParamRange{"n_samples", true, 5, 100}, ParamRange{"T", false, 0.02, 5e4},
           ParamRange{"visit", false, 1.5, 2.5}, ParamRange{"acceptance", false, -1.1e4, -5}}};
}

std::array<double, 4> ParamSpace::to_vector(const SAConfig& c) {
  return {static_cast<double>(c.n_samples), c.initial_temp, c.visit, c.acceptance};
}

SAConfig ParamSpace::from_vector(const std::array<double, 4>& v) const {
  std::array<double, 4> x{};
  for (int p = 0; p < 4; ++p) {
    x[p] = ranges[p].integer ? std::round(v[p]) : v[p];
    x[p] = std::clamp(x[p], ranges[p].lower, ranges[p].upper);
  }
  return SAConfig{static_cast<int>(x[0]), x[1], x[2], x[3]};
}

bool ParamSpace::contains(const SAConfig& c) const {
  const auto v = to_vector(c);
  for (int p = 0; p < 4; ++p)
    if (!(v[p] >= ranges[p].lower && v[p] <= ranges[p].upper)) return false;
  return true;
}

std::vector<SAConfig> sample_candidates(const RaceState& state, const ParamSpace& space, int k, std::uint64_t seed) {
  if (k < 2) throw DomainError("need at least two candidates per race");
  Rng rng(seed);
  std::vector<SAConfig> out;
  out.reserve(k);
  const bool uniform = state.iteration <= 1 || state.elites.empty();
  const std::size_t n_elites = state.elites.size();
  const double weight_total = 0.5 * n_elites * (n_elites + 1);
  for (int i = 0; i < k; ++i) {
    std::array<double, 4> v{};
    if (uniform) {
      for (int p = 0; p < 4; ++p) {
        const auto& r = space.ranges[p];
        v[p] = r.integer ? r.lower + static_cast<double>(rng.below(static_cast<std::size_t>(r.upper - r.lower) + 1))
                         : rng.uniform(r.lower, r.upper);
      }
    } else {
      // Rank weights n, n-1, ..., 1.
      double pick = rng.uniform() * weight_total;
      std::size_t e = 0;
      while (e + 1 < n_elites && pick >= static_cast<double>(n_elites - e)) {
        pick -= static_cast<double>(n_elites - e);
        ++e;
      }
      const auto centre = ParamSpace::to_vector(state.elites[e].config);
      for (int p = 0; p < 4; ++p) {
        const auto& r = space.ranges[p];
        const double sd = state.spread[p] * (r.upper - r.lower);
        double x = centre[p];
        if (sd > 0.0) {
          int tries = 0;
          do {
            x = centre[p] + sd * rng.normal();
          } while ((x < r.lower || x > r.upper) && ++tries < 100);
        }
        v[p] = x;
      }
    }
    out.push_back(space.from_vector(v));
  }
  return out;
}

double friedman_statistic(const std::vector<std::vector<double>>& blocks) {
  if (blocks.empty()) return 0.0;
  const std::size_t b = blocks.size(), k = blocks[0].size();
  std::vector<double> rank_sum(k, 0.0);
  double a = 0.0;
  for (const auto& row : blocks) {
    const auto r = stats::average_ranks(row);
    for (std::size_t j = 0; j < k; ++j) {
      rank_sum[j] += r[j];
      a += r[j] * r[j];
    }
  }
  const double c = b * k * (k + 1.0) * (k + 1.0) / 4.0;
  if (!(a - c > 1e-9 * c)) return 0.0;
  double s = 0.0;
  for (double rs : rank_sum) s += (rs - b * (k + 1.0) / 2.0) * (rs - b * (k + 1.0) / 2.0);
  return (k - 1.0) * s / (a - c);
}

RaceResult race(std::span<const SAConfig> candidates, std::size_t n_units, const CostFn& cost,
                const RaceOptions& options) {
  return race(candidates, n_units, cost, options, {});
}

RaceResult race(std::span<const SAConfig> candidates, std::size_t n_units, const CostFn& cost,
                const RaceOptions& options, const std::vector<std::vector<double>>& known) {
  if (candidates.size() < 2) throw DomainError("a race needs at least two candidates");
  if (n_units < options.first_test) throw ProtocolError("evaluation stream ends before the first test");
  RaceResult res;
  res.costs.resize(candidates.size());
  std::vector<std::size_t> alive(candidates.size());
  std::iota(alive.begin(), alive.end(), 0);
  auto known_cost = [&](std::size_t c, std::size_t u) {
    return c < known.size() && u < known[c].size() ? known[c][u] : kUnknown;
  };

  for (std::size_t u = 0; u < n_units; ++u) {
    if (u >= options.first_test && alive.size() <= options.min_survivors) break;
    long needed = 0;
    for (auto c : alive) needed += std::isnan(known_cost(c, u)) ? 1 : 0;
    if (options.budget >= 0 && res.experiments + needed > options.budget) break;
    for (auto c : alive) {
      double v = known_cost(c, u);
      if (std::isnan(v)) {
        v = cost(candidates[c], u);
        ++res.experiments;
      }
      res.costs[c].push_back(v);
    }
    res.units_used = u + 1;
    if (res.units_used < options.first_test || alive.size() < 2) continue;

    std::vector<std::vector<double>> blocks(res.units_used, std::vector<double>(alive.size()));
    for (std::size_t b = 0; b < res.units_used; ++b)
      for (std::size_t j = 0; j < alive.size(); ++j) blocks[b][j] = res.costs[alive[j]][b];
    const double stat = friedman_statistic(blocks);
    const double k = static_cast<double>(alive.size());
    const double b = static_cast<double>(res.units_used);
    if (stat <= 0.0) continue;
    const boost::math::chi_squared_distribution<double> chi(k - 1.0);
    if (boost::math::cdf(boost::math::complement(chi, stat)) >= options.alpha) continue;

    // Conover post-hoc on rank sums.
    std::vector<double> rank_sum(alive.size(), 0.0);
    double a = 0.0;
    for (const auto& row : blocks) {
      const auto r = stats::average_ranks(row);
      for (std::size_t j = 0; j < r.size(); ++j) {
        rank_sum[j] += r[j];
        a += r[j] * r[j];
      }
    }
    double sum_r2 = 0.0;
    for (double r : rank_sum) sum_r2 += r * r;
    const double df = (b - 1.0) * (k - 1.0);
    const boost::math::students_t_distribution<double> t(df);
    const double q = boost::math::quantile(t, 1.0 - options.alpha / 2.0);
    const double crit = q * std::sqrt(std::max(0.0, 2.0 * (b * a - sum_r2) / df));
    const double best = *std::min_element(rank_sum.begin(), rank_sum.end());
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < alive.size(); ++j)
      if (rank_sum[j] - best <= crit) keep.push_back(alive[j]);
    alive = std::move(keep);
  }
  res.survivors = alive;
  return res;
}

std::uint64_t unit_seed(std::uint64_t seed, std::size_t unit) {
  return derive_seed(seed, "unit", {static_cast<std::uint64_t>(unit)});
}

TuneResult tune(const CostFn& cost, long budget, std::uint64_t seed, const TuneOptions& options,
                const ParamSpace& space) {
  if (budget < 50) throw DomainError("tuning budget must be at least 50 experiments");
  if (options.elite_count < 1) throw DomainError("elite count must be >= 1");
  const std::size_t units = options.n_units;
  const std::size_t first_test = 5;
  if (units < first_test) throw ProtocolError("need at least 5 evaluation units");

  TuneResult out;
  std::map<Key, std::vector<double>> cache;
  auto costs_for = [&](const SAConfig& c) -> std::vector<double>& {
    auto& v = cache[ParamSpace::to_vector(c)];
    if (v.empty()) v.assign(units, kUnknown);
    return v;
  };

  RaceState state;
  state.spread.fill(options.initial_spread);
  state.budget_remaining = budget;
  const int k = std::max<int>(4, static_cast<int>(budget / (6 * static_cast<long>(units))));

  int stale = 0;
  while (state.budget_remaining >= static_cast<long>(first_test) && stale < 10) {
    const int iteration = state.iteration;
    int n_new = std::max(1, k - static_cast<int>(state.elites.size()));
    n_new = std::min<long>(n_new, state.budget_remaining / static_cast<long>(first_test));
    std::vector<SAConfig> candidates;
    for (const auto& e : state.elites) candidates.push_back(e.config);
    const auto fresh = sample_candidates(state, space, std::max(2, n_new),
                                         derive_seed(seed, "sample", {static_cast<std::uint64_t>(iteration)}));
    candidates.insert(candidates.end(), fresh.begin(), fresh.begin() + n_new);
    if (candidates.size() < 2) candidates.push_back(fresh[1]);

    const long spent_before = static_cast<long>(out.log.size());
    CostFn logged = [&](const SAConfig& c, std::size_t u) {
      auto& slot = costs_for(c)[u];
      if (std::isnan(slot)) {
        slot = cost(c, u);
        out.log.push_back({iteration, c, u, unit_seed(seed, u), slot});
        --state.budget_remaining;
        ++out.experiments;
      }
      return slot;
    };
    std::vector<std::vector<double>> known;
    for (const auto& c : candidates) known.push_back(costs_for(c));
    RaceOptions ro;
    ro.alpha = options.alpha;
    ro.min_survivors = std::max<std::size_t>(2, options.elite_count);
    ro.first_test = first_test;
    ro.budget = state.budget_remaining;
    const auto result = race(candidates, units, logged, ro, known);

    // Complete survivors on the remaining units while the budget allows.
    for (auto s : result.survivors) {
      auto& v = costs_for(candidates[s]);
      for (std::size_t u = 0; u < units; ++u) {
        if (!std::isnan(v[u])) continue;
        if (state.budget_remaining <= 0) break;
        logged(candidates[s], u);
      }
    }

    std::vector<Elite> pool = state.elites;
    for (auto s : result.survivors) {
      const auto& v = costs_for(candidates[s]);
      if (std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); })) continue;
      const bool dup = std::any_of(pool.begin(), pool.end(), [&](const Elite& e) { return e.config == candidates[s]; });
      if (!dup) pool.push_back({candidates[s], v, mean_of(v)});
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Elite& a, const Elite& b) { return a.mean_cost < b.mean_cost; });
    if (pool.size() > options.elite_count) pool.resize(options.elite_count);
    state.elites = std::move(pool);
    double elite_mean = 0.0;
    for (const auto& e : state.elites) elite_mean += e.mean_cost;
    out.elite_mean_history.push_back(state.elites.empty() ? kUnknown : elite_mean / state.elites.size());

    for (auto& s : state.spread) s *= options.spread_decay;
    ++state.iteration;
    out.iterations = iteration;
    const long spent_now = static_cast<long>(out.log.size());
    stale = spent_now == spent_before ? stale + 1 : 0;
  }

  if (state.elites.empty()) {
    // Nothing completed every unit: rank by mean over the units seen.
    std::vector<Elite> partial;
    for (const auto& [key, v] : cache) {
      std::vector<double> seen;
      for (double x : v)
        if (!std::isnan(x)) seen.push_back(x);
      if (!seen.empty()) partial.push_back({space.from_vector(key), seen, mean_of(seen)});
    }
    std::stable_sort(partial.begin(), partial.end(),
                     [](const Elite& a, const Elite& b) { return a.mean_cost < b.mean_cost; });
    if (partial.size() > options.elite_count) partial.resize(options.elite_count);
    state.elites = std::move(partial);
  }
  out.elites = state.elites;
  return out;
}

std::string audit_jsonl(const std::vector<AuditRecord>& log) {
  std::ostringstream os;
  for (const auto& r : log) {
    nlohmann::json j = {{"iteration", r.iteration},
                        {"config", solvers::to_json(r.config)},
                        {"unit", r.unit},
                        {"unit_seed", r.unit_seed},
                        {"cost", r.cost}};
    os << j.dump() << '\n';
  }
  return os.str();
}

nlohmann::json elites_json(const std::vector<Elite>& elites) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < elites.size(); ++i) {
    auto j = solvers::to_json(elites[i].config);
    j["rank"] = i + 1;
    j["mean_cost"] = elites[i].mean_cost;
    arr.push_back(j);
  }
  return arr;
}

std::vector<SAConfig> configs_from_elites_json(const nlohmann::json& j) {
  std::vector<SAConfig> out;
  if (j.is_array()) {
    for (const auto& e : j) out.push_back(solvers::sa_config_from_json(e));
  } else if (j.is_object() && j.contains("elites")) {
    return configs_from_elites_json(j.at("elites"));
  } else {
    out.push_back(solvers::sa_config_from_json(j));
  }
  if (out.empty()) throw ConsistencyError("elites document holds no configurations");
  return out;
}

}  // namespace trajsel::tuner
