#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "trajsel/bench/instance.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/solvers/run_result.hpp"

namespace trajsel::solvers {

/// The four probe parameters.
struct SAConfig {
  int n_samples = 100;
  double initial_temp = 5230.0;
  double visit = 2.62;
  double acceptance = -5.0;

  friend bool operator==(const SAConfig&, const SAConfig&) = default;
};

/// Library defaults of the generalized annealer: (100, 5230, 2.62, -5).
SAConfig default_sa_config();

/// Throws DomainError unless n_samples in [5,100], initial_temp in
/// [0.02, 5e4], visit in (1, 3) and acceptance in [-1.1e4, -5].
void validate(const SAConfig& config);

nlohmann::json to_json(const SAConfig& config);
/// Reads {n_samples, T, visit, acceptance}; validates.
SAConfig sa_config_from_json(const nlohmann::json& j);

/// T(t) = T0 (2^(q-1) - 1) / ((1+t)^(q-1) - 1), t >= 1.
double gsa_temperature(double initial_temp, double visit, long t);

/// Generalized Metropolis rule. Returns 1 for delta_e <= 0; otherwise
/// [1 - (1-q_a) delta_e / T]^(1/(1-q_a)) when the bracket is positive, else 0.
double gsa_acceptance_probability(double delta_e, double temperature, double acceptance);

/// Tsallis visiting distribution, sampled by the Gaussian-ratio method.
class VisitingDistribution {
 public:
  explicit VisitingDistribution(double visit);
  /// One heavy-tailed step component at the given temperature.
  double sample(double temperature, Rng& rng) const;

 private:
  double visit_;
  double factor4_p_;
  double factor6_;
};

/// Generalized simulated annealing for exactly config.n_samples evaluations,
/// no local search. Out-of-domain proposals are reflected back into [-5,5]^d.
RunResult run_gsa(const bench::ProblemInstance& instance, const SAConfig& config, std::uint64_t seed,
                  bench::EvalBudget& budget);

/// Mirror x into [lo, hi] (triangle-wave reflection, handles any magnitude).
double reflect_into(double x, double lo, double hi);

}  // namespace trajsel::solvers
