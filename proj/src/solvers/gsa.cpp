#include "trajsel/solvers/gsa.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "trajsel/common/errors.hpp"

namespace trajsel::solvers {

namespace {

constexpr double kTailLimit = 1e8;
// Re-anneal once the temperature falls below this fraction of T0.
constexpr double kRestartRatio = 2e-5;

}  // namespace

SAConfig default_sa_config() { return SAConfig{100, 5230.0, 2.62, -5.0}; }

void validate(const SAConfig& c) {
  if (c.n_samples < 5 || c.n_samples > 100) throw DomainError("n_samples must lie in [5, 100]");
  if (!(c.initial_temp >= 0.02 && c.initial_temp <= 5e4)) throw DomainError("initial temperature must lie in [0.02, 5e4]");
  if (!(c.visit > 1.0 && c.visit < 3.0)) throw DomainError("visit parameter must lie in (1, 3)");
  if (!(c.acceptance >= -1.1e4 && c.acceptance <= -5.0)) throw DomainError("acceptance must lie in [-1.1e4, -5]");
}

nlohmann::json to_json(const SAConfig& c) {
  return {{"n_samples", c.n_samples}, {"T", c.initial_temp}, {"visit", c.visit}, {"acceptance", c.acceptance}};
}

SAConfig sa_config_from_json(const nlohmann::json& j) {
  SAConfig c;
  try {
    c.n_samples = j.at("n_samples").get<int>();
    c.initial_temp = j.at("T").get<double>();
    c.visit = j.at("visit").get<double>();
    c.acceptance = j.at("acceptance").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed SA configuration: ") + e.what());
  }
  validate(c);
  return c;
}

double gsa_temperature(double initial_temp, double visit, long t) {
  if (t < 1) throw DomainError("temperature step must be >= 1");
  const double t1 = std::exp((visit - 1.0) * std::log(2.0)) - 1.0;
  const double t2 = std::exp((visit - 1.0) * std::log(static_cast<double>(t) + 1.0)) - 1.0;
  return initial_temp * t1 / t2;
}

double gsa_acceptance_probability(double delta_e, double temperature, double acceptance) {
  if (delta_e <= 0.0) return 1.0;
  const double bracket = 1.0 - (1.0 - acceptance) * delta_e / temperature;
  if (bracket <= 0.0) return 0.0;
  return std::exp(std::log(bracket) / (1.0 - acceptance));
}

VisitingDistribution::VisitingDistribution(double visit) : visit_(visit) {
  const double q = visit;
  const double factor2 = std::exp((4.0 - q) * std::log(q - 1.0));
  const double factor3 = std::exp((2.0 - q) * std::log(2.0) / (q - 1.0));
  factor4_p_ = std::sqrt(std::numbers::pi) * factor2 / (factor3 * (3.0 - q));
  const double factor5 = 1.0 / (q - 1.0) - 0.5;
  const double d1 = 2.0 - factor5;
  factor6_ = std::numbers::pi * (1.0 - factor5) / std::sin(std::numbers::pi * (1.0 - factor5)) /
             std::exp(std::lgamma(d1));
}

double VisitingDistribution::sample(double temperature, Rng& rng) const {
  const double q = visit_;
  double x = rng.normal();
  const double y = rng.normal();
  const double factor1 = std::exp(std::log(temperature) / (q - 1.0));
  const double factor4 = factor4_p_ * factor1;
  x *= std::exp(-(q - 1.0) * std::log(factor6_ / factor4) / (3.0 - q));
  const double den = std::exp((q - 1.0) * std::log(std::abs(y)) / (3.0 - q));
  double step = x / den;
  if (step > kTailLimit) step = kTailLimit * rng.uniform();
  else if (step < -kTailLimit) step = -kTailLimit * rng.uniform();
  else if (!std::isfinite(step)) step = 0.0;
  return step;
}

double reflect_into(double x, double lo, double hi) {
  const double width = hi - lo;
  const double period = 2.0 * width;
  double m = std::fmod(x - lo, period);
  if (m < 0.0) m += period;
  if (m > width) m = period - m;
  return lo + m;
}

RunResult run_gsa(const bench::ProblemInstance& instance, const SAConfig& config, std::uint64_t seed,
                  bench::EvalBudget& budget) {
  validate(config);
  budget.require(config.n_samples);
  const int d = instance.dim();
  const long n = config.n_samples;
  Rng rng(seed);
  VisitingDistribution visiting(config.visit);

  RunResult result;
  result.seed = seed;

  auto random_point = [&] {
    std::vector<double> x(d);
    for (auto& xi : x) xi = rng.uniform(bench::kLower, bench::kUpper);
    return x;
  };
  auto eval = [&](const std::vector<double>& x) {
    const double f = bench::evaluate(instance, x, budget);
    result.record(f);
    return f;
  };

  std::vector<double> x = random_point();
  double energy = eval(x);
  std::vector<double> proposal(d);

  long step = 1;
  while (result.evals_used < n) {
    const double temperature = gsa_temperature(config.initial_temp, config.visit, step);
    if (temperature < kRestartRatio * config.initial_temp) {
      x = random_point();
      energy = eval(x);
      step = 1;
      continue;
    }
    const double accept_temperature = temperature / static_cast<double>(step);
    // Markov chain of 2d moves: d full-vector moves, then one coordinate at a time.
    for (int j = 0; j < 2 * d && result.evals_used < n; ++j) {
      proposal = x;
      if (j < d) {
        for (int i = 0; i < d; ++i)
          proposal[i] = reflect_into(x[i] + visiting.sample(temperature, rng), bench::kLower, bench::kUpper);
      } else {
        const int i = j - d;
        proposal[i] = reflect_into(x[i] + visiting.sample(temperature, rng), bench::kLower, bench::kUpper);
      }
      const double e = eval(proposal);
      if (e < energy) {
        x = proposal;
        energy = e;
      } else {
        const double p = gsa_acceptance_probability(e - energy, accept_temperature, config.acceptance);
        if (rng.uniform() < p) {
          x = proposal;
          energy = e;
        }
      }
    }
    ++step;
  }
  return result;
}

}  // namespace trajsel::solvers
