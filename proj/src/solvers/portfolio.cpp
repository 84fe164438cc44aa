#include "trajsel/solvers/portfolio.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/solvers/gsa.hpp"

namespace trajsel::solvers {

namespace {

void check_run_args(const SolverParams& params, int generations, bench::EvalBudget& budget) {
  if (params.population < 1) throw DomainError("population must be >= 1");
  if (generations < 1) throw DomainError("generations must be >= 1");
  budget.require(static_cast<long>(params.population) * generations);
}

double constant(const SolverParams& params, const std::string& name, double fallback) {
  auto it = params.constants.find(name);
  return it == params.constants.end() ? fallback : it->second;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

SolverParams default_params(SolverId id, int dim) {
  SolverParams p;
  p.solver_id = id;
  switch (id) {
    case SolverId::CMAES:
      p.population = 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim))));
      p.constants = {{"sigma0", 2.0}};
      break;
    case SolverId::DE:
      p.population = 3 * dim;
      p.constants = {{"F", 0.5}, {"CR", 0.9}};
      break;
    case SolverId::PSO:
      p.population = 4 * dim;
      p.constants = {{"inertia", 0.7298}, {"cognitive", 1.49618}, {"social", 1.49618}, {"vmax", 5.0}};
      break;
    case SolverId::SA:
      throw DomainError("SA is configured through SAConfig, not SolverParams");
  }
  return p;
}

RunResult run_cmaes(const bench::ProblemInstance& instance, const SolverParams& params, int generations,
                    std::uint64_t seed, bench::EvalBudget& budget) {
  check_run_args(params, generations, budget);
  const int n = instance.dim();
  const int lambda = params.population;
  const int mu = std::max(1, lambda / 2);
  const double sigma0 = constant(params, "sigma0", 2.0);

  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  weights /= weights.sum();
  const double mueff = 1.0 / weights.squaredNorm();
  const double dn = static_cast<double>(n);
  const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
  const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
  const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
  const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
  const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
  const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

  Rng rng(seed);
  RunResult result;
  result.seed = seed;

  Eigen::VectorXd mean(n), ps(n), pc(n), diag(n);
  Eigen::MatrixXd cov, basis;
  double sigma = sigma0;
  int gen_since_restart = 0;
  auto restart = [&] {
    for (int i = 0; i < n; ++i) mean[i] = rng.uniform(-4.0, 4.0);
    ps.setZero();
    pc.setZero();
    cov = Eigen::MatrixXd::Identity(n, n);
    basis = Eigen::MatrixXd::Identity(n, n);
    diag.setOnes();
    sigma = sigma0;
    gen_since_restart = 0;
  };
  restart();

  Eigen::MatrixXd xs(n, lambda), ys(n, lambda);
  std::vector<double> fit(lambda);
  std::vector<int> order(lambda);
  for (int g = 0; g < generations; ++g) {
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = rng.normal();
      Eigen::VectorXd x = mean + sigma * (basis * diag.cwiseProduct(z));
      for (int i = 0; i < n; ++i) x[i] = reflect_into(x[i], bench::kLower, bench::kUpper);
      xs.col(k) = x;
      ys.col(k) = (x - mean) / sigma;
      fit[k] = bench::evaluate(instance, to_std(x), budget);
      result.record(fit[k]);
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fit[a] < fit[b]; });

    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * ys.col(order[i]);
    mean += sigma * y_w;
    ++gen_since_restart;

    const Eigen::VectorXd inv_sqrt_y = basis * (basis.transpose() * y_w).cwiseQuotient(diag);
    ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * inv_sqrt_y;
    const double ps_norm = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen_since_restart)) / chi_n;
    const double hsig = ps_norm < 1.4 + 2.0 / (dn + 1.0) ? 1.0 : 0.0;
    pc = (1.0 - cc) * pc + hsig * std::sqrt(cc * (2.0 - cc) * mueff) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) rank_mu += weights[i] * ys.col(order[i]) * ys.col(order[i]).transpose();
    cov = (1.0 - c1 - cmu) * cov + c1 * (pc * pc.transpose() + (1.0 - hsig) * cc * (2.0 - cc) * cov) + cmu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());
    sigma *= std::exp((cs / damps) * (ps.norm() / chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd ev = eig.eigenvalues();
    const bool degenerate = eig.info() != Eigen::Success || !ev.allFinite() || ev.minCoeff() <= 0.0 ||
                            ev.maxCoeff() > 1e14 * ev.minCoeff() || !std::isfinite(sigma) ||
                            sigma * std::sqrt(ev.maxCoeff()) < 1e-14 || !mean.allFinite();
    if (degenerate) {
      ++result.restarts;
      restart();
      continue;
    }
    basis = eig.eigenvectors();
    diag = ev.cwiseSqrt();
  }
  return result;
}

RunResult run_de(const bench::ProblemInstance& instance, const SolverParams& params, int generations,
                 std::uint64_t seed, bench::EvalBudget& budget) {
  check_run_args(params, generations, budget);
  const int np = params.population;
  if (np < 4) throw DomainError("DE/rand/1 needs a population of at least 4");
  const int d = instance.dim();
  const double f_scale = constant(params, "F", 0.5);
  const double cr = constant(params, "CR", 0.9);

  Rng rng(seed);
  RunResult result;
  result.seed = seed;

  std::vector<std::vector<double>> pop(np, std::vector<double>(d));
  std::vector<double> fit(np);
  for (int i = 0; i < np; ++i) {
    for (auto& x : pop[i]) x = rng.uniform(bench::kLower, bench::kUpper);
    fit[i] = bench::evaluate(instance, pop[i], budget);
    result.record(fit[i]);
  }
  std::vector<double> trial(d);
  for (int g = 1; g < generations; ++g) {
    auto next = pop;
    auto next_fit = fit;
    for (int i = 0; i < np; ++i) {
      int r1, r2, r3;
      do r1 = static_cast<int>(rng.below(np)); while (r1 == i);
      do r2 = static_cast<int>(rng.below(np)); while (r2 == i || r2 == r1);
      do r3 = static_cast<int>(rng.below(np)); while (r3 == i || r3 == r1 || r3 == r2);
      const int jrand = static_cast<int>(rng.below(d));
      for (int j = 0; j < d; ++j) {
        const bool cross = rng.uniform() < cr || j == jrand;
        const double v = pop[r1][j] + f_scale * (pop[r2][j] - pop[r3][j]);
        trial[j] = cross ? reflect_into(v, bench::kLower, bench::kUpper) : pop[i][j];
      }
      const double f = bench::evaluate(instance, trial, budget);
      result.record(f);
      if (f <= fit[i]) {
        next[i] = trial;
        next_fit[i] = f;
      }
    }
    pop = std::move(next);
    fit = std::move(next_fit);
  }
  return result;
}

RunResult run_pso(const bench::ProblemInstance& instance, const SolverParams& params, int generations,
                  std::uint64_t seed, bench::EvalBudget& budget) {
  check_run_args(params, generations, budget);
  const int np = params.population;
  const int d = instance.dim();
  const double w = constant(params, "inertia", 0.7298);
  const double c1 = constant(params, "cognitive", 1.49618);
  const double c2 = constant(params, "social", 1.49618);
  const double vmax = constant(params, "vmax", 0.5 * (bench::kUpper - bench::kLower));

  Rng rng(seed);
  RunResult result;
  result.seed = seed;

  std::vector<std::vector<double>> pos(np, std::vector<double>(d)), vel(np, std::vector<double>(d));
  std::vector<std::vector<double>> pbest(np);
  std::vector<double> pbest_fit(np);
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < d; ++j) {
      pos[i][j] = rng.uniform(bench::kLower, bench::kUpper);
      vel[i][j] = rng.uniform(-vmax, vmax);
    }
    pbest_fit[i] = bench::evaluate(instance, pos[i], budget);
    pbest[i] = pos[i];
    result.record(pbest_fit[i]);
  }
  int gbest = static_cast<int>(std::min_element(pbest_fit.begin(), pbest_fit.end()) - pbest_fit.begin());

  for (int g = 1; g < generations; ++g) {
    const std::vector<double> leader = pbest[gbest];
    for (int i = 0; i < np; ++i) {
      for (int j = 0; j < d; ++j) {
        double v = w * vel[i][j] + c1 * rng.uniform() * (pbest[i][j] - pos[i][j]) +
                   c2 * rng.uniform() * (leader[j] - pos[i][j]);
        v = std::clamp(v, -vmax, vmax);
        double x = pos[i][j] + v;
        // Bound repair: clamp and stop the particle on that coordinate.
        if (x < bench::kLower || x > bench::kUpper) {
          x = std::clamp(x, bench::kLower, bench::kUpper);
          v = 0.0;
        }
        pos[i][j] = x;
        vel[i][j] = v;
      }
      const double f = bench::evaluate(instance, pos[i], budget);
      result.record(f);
      if (f < pbest_fit[i]) {
        pbest_fit[i] = f;
        pbest[i] = pos[i];
      }
    }
    gbest = static_cast<int>(std::min_element(pbest_fit.begin(), pbest_fit.end()) - pbest_fit.begin());
  }
  return result;
}

RunResult run_portfolio_solver(const bench::ProblemInstance& instance, const SolverParams& params,
                               int generations, std::uint64_t seed, bench::EvalBudget& budget) {
  switch (params.solver_id) {
    case SolverId::CMAES: return run_cmaes(instance, params, generations, seed, budget);
    case SolverId::DE: return run_de(instance, params, generations, seed, budget);
    case SolverId::PSO: return run_pso(instance, params, generations, seed, budget);
    case SolverId::SA: break;
  }
  throw DomainError("run_portfolio_solver does not handle SA");
}

}  // namespace trajsel::solvers
