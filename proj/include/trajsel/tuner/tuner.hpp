#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "trajsel/solvers/gsa.hpp"

namespace trajsel::tuner {

using solvers::SAConfig;

struct ParamRange {
  std::string name;
  bool integer = false;
  double lower = 0.0;
  double upper = 0.0;
};

/// Search space over the four probe parameters, in the order
/// n_samples, T, visit, acceptance.
struct ParamSpace {
  std::array<ParamRange, 4> ranges;

  /// n in [5,100] (integer), T in [0.02, 5e4], visit in [1.5, 2.5], acceptance in [-1.1e4, -5].
  static ParamSpace standard();
  bool contains(const SAConfig& c) const;
  static std::array<double, 4> to_vector(const SAConfig& c);
  /// Rounds integer parameters and clamps into the bounds.
  SAConfig from_vector(const std::array<double, 4>& v) const;
};

struct Elite {
  SAConfig config;
  std::vector<double> costs;  // per evaluation unit, in unit order
  double mean_cost = 0.0;
};

struct RaceState {
  int iteration = 1;
  std::vector<Elite> elites;          // sorted by mean cost
  std::array<double, 4> spread{};     // per-parameter std-dev as a fraction of the range
  long budget_remaining = 0;
};

/// Iteration 1: uniform in bounds. Later: truncated normal around a
/// rank-weighted random elite with the state's spread.
std::vector<SAConfig> sample_candidates(const RaceState& state, const ParamSpace& space, int k, std::uint64_t seed);

/// Cost of one configuration on one evaluation unit.
using CostFn = std::function<double(const SAConfig&, std::size_t unit)>;

struct RaceOptions {
  double alpha = 0.05;
  std::size_t min_survivors = 2;
  std::size_t first_test = 5;
  long budget = -1;  // cost calls allowed in this race; < 0 means unlimited
};

struct RaceResult {
  std::vector<std::size_t> survivors;      // candidate indices, ascending
  std::vector<std::vector<double>> costs;  // per candidate, units evaluated so far
  std::size_t units_used = 0;
  long experiments = 0;
};

/// Friedman statistic on a blocks x treatments cost table (ranks within
/// blocks, ties averaged, tie-corrected). Returns 0 when every block is all ties.
double friedman_statistic(const std::vector<std::vector<double>>& blocks);

/// Evaluates candidates in lockstep over units 0..n_units-1. From unit
/// `first_test` on, a Friedman test at `alpha` followed by a rank-sum post-hoc
/// test drops candidates significantly worse than the best. Stops when the
/// units or budget run out or at most min_survivors remain.
RaceResult race(std::span<const SAConfig> candidates, std::size_t n_units, const CostFn& cost,
                const RaceOptions& options = {});
/// As above; known[c][u] (NaN when unknown) is reused without a cost call.
RaceResult race(std::span<const SAConfig> candidates, std::size_t n_units, const CostFn& cost,
                const RaceOptions& options, const std::vector<std::vector<double>>& known);

struct AuditRecord {
  int iteration = 0;
  SAConfig config;
  std::size_t unit = 0;
  std::uint64_t unit_seed = 0;
  double cost = 0.0;
};

struct TuneOptions {
  std::size_t n_units = 10;
  std::size_t elite_count = 4;
  double alpha = 0.05;
  double initial_spread = 0.5;
  double spread_decay = 0.85;
};

struct TuneResult {
  std::vector<Elite> elites;  // up to elite_count, ranked by mean cost
  std::vector<AuditRecord> log;
  std::vector<double> elite_mean_history;  // mean cost of the elite set after each iteration
  long experiments = 0;
  int iterations = 0;
};

/// Iterated racing until the experiment budget is spent. Each cost call on a
/// new (configuration, unit) pair counts as one experiment; repeats are cached.
TuneResult tune(const CostFn& cost, long budget, std::uint64_t seed, const TuneOptions& options = {},
                const ParamSpace& space = ParamSpace::standard());

/// Seed attached to an evaluation unit in audit records.
std::uint64_t unit_seed(std::uint64_t seed, std::size_t unit);

/// One JSON object per line: iteration, config, unit, unit_seed, cost.
std::string audit_jsonl(const std::vector<AuditRecord>& log);
/// Array of {rank, n_samples, T, visit, acceptance, mean_cost}.
nlohmann::json elites_json(const std::vector<Elite>& elites);
/// Reads an elites document (or a single config object); returns configs by rank.
std::vector<SAConfig> configs_from_elites_json(const nlohmann::json& j);

}  // namespace trajsel::tuner
