#include "trajsel/bench/instance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"

namespace trajsel::bench {

namespace {

constexpr std::array<CatalogEntry, 12> kCatalog{{
    {1, "sphere", "separable", false},
    {2, "ellipsoid_separable", "separable", false},
    {3, "rastrigin_separable", "separable", false},
    {5, "linear_slope", "separable", false},
    {6, "attractive_sector", "low_conditioning", true},
    {7, "step_ellipsoid", "low_conditioning", true},
    {8, "rosenbrock", "low_conditioning", false},
    {10, "ellipsoid_rotated", "high_conditioning", true},
    {17, "schaffers_f7", "multimodal_global", true},
    {19, "griewank_rosenbrock", "multimodal_global", true},
    {20, "schwefel", "multimodal_weak", false},
    {21, "gallagher_21_peaks", "multimodal_weak", true},
}};

constexpr int kGallagherPeaks = 21;
constexpr double kSchwefelOptimum = 420.968746;

// 10^(exponent * i / (d - 1))
double conditioning(double exponent, int i, int d) {
  return std::pow(10.0, exponent * static_cast<double>(i) / static_cast<double>(d - 1));
}

// Diagonal scaling Lambda^alpha used by several BBOB functions.
double lambda(double alpha, int i, int d) {
  return std::pow(alpha, 0.5 * static_cast<double>(i) / static_cast<double>(d - 1));
}

Eigen::MatrixXd random_rotation(Rng& rng, int d) {
  Eigen::MatrixXd g(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) g(r, c) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column signs so the factorization is unique.
  for (int c = 0; c < d; ++c)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  return q;
}

double sphere(const Eigen::VectorXd& z) { return z.squaredNorm(); }

double ellipsoid(const Eigen::VectorXd& z) {
  const int d = static_cast<int>(z.size());
  double f = 0.0;
  for (int i = 0; i < d; ++i) f += conditioning(6.0, i, d) * z[i] * z[i];
  return f;
}

double rastrigin(const Eigen::VectorXd& z) {
  const int d = static_cast<int>(z.size());
  double cos_sum = 0.0;
  for (int i = 0; i < d; ++i) cos_sum += std::cos(2.0 * std::numbers::pi * z[i]);
  return 10.0 * (static_cast<double>(d) - cos_sum) + z.squaredNorm();
}

// Piecewise-linear slope with the optimum inside the domain; the gradient is
// five times steeper on the side given by signs.
double linear_slope(const Eigen::VectorXd& z, const Eigen::VectorXd& signs) {
  const int d = static_cast<int>(z.size());
  double f = 0.0;
  for (int i = 0; i < d; ++i) {
    const double steep = z[i] * signs[i] > 0.0 ? 5.0 : 1.0;
    f += conditioning(1.0, i, d) * steep * std::abs(z[i]);
  }
  return f;
}

double attractive_sector(const Eigen::VectorXd& z_rot, const Eigen::VectorXd& signs) {
  const int d = static_cast<int>(z_rot.size());
  double f = 0.0;
  for (int i = 0; i < d; ++i) {
    const double z = lambda(10.0, i, d) * z_rot[i];
    const double s = z * signs[i] > 0.0 ? 100.0 : 1.0;
    f += (s * z) * (s * z);
  }
  return std::pow(f, 0.9);
}

double step_ellipsoid(const Eigen::VectorXd& z_rot) {
  const int d = static_cast<int>(z_rot.size());
  double first = 0.0;
  double f = 0.0;
  for (int i = 0; i < d; ++i) {
    const double zh = lambda(10.0, i, d) * z_rot[i];
    if (i == 0) first = std::abs(zh) / 1e4;
    const double zt = std::abs(zh) > 0.5 ? std::floor(0.5 + zh) : std::floor(0.5 + 10.0 * zh) / 10.0;
    f += conditioning(2.0, i, d) * zt * zt;
  }
  return 0.1 * std::max(first, f);
}

double rosenbrock_terms(const Eigen::VectorXd& z) {
  double f = 0.0;
  for (Eigen::Index i = 0; i + 1 < z.size(); ++i) {
    const double a = z[i] * z[i] - z[i + 1];
    f += 100.0 * a * a + (z[i] - 1.0) * (z[i] - 1.0);
  }
  return f;
}

double rosenbrock_scale(int d) { return std::max(1.0, std::sqrt(static_cast<double>(d)) / 8.0); }

double schaffers_f7(const Eigen::VectorXd& z_rot) {
  const int d = static_cast<int>(z_rot.size());
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z[i] = lambda(10.0, i, d) * z_rot[i];
  double acc = 0.0;
  for (int i = 0; i + 1 < d; ++i) {
    const double s = std::sqrt(z[i] * z[i] + z[i + 1] * z[i + 1]);
    const double rs = std::sqrt(s);
    const double sn = std::sin(50.0 * std::pow(s, 0.2));
    acc += rs + rs * sn * sn;
  }
  acc /= static_cast<double>(d - 1);
  return acc * acc;
}

double griewank_rosenbrock(const Eigen::VectorXd& z) {
  const int d = static_cast<int>(z.size());
  double acc = 0.0;
  for (int i = 0; i + 1 < d; ++i) {
    const double a = z[i] * z[i] - z[i + 1];
    const double s = 100.0 * a * a + (z[i] - 1.0) * (z[i] - 1.0);
    acc += s / 4000.0 - std::cos(s);
  }
  return 10.0 * acc / static_cast<double>(d - 1) + 10.0;
}

// Classic Schwefel term re-centred so each coordinate contributes exactly 0
// at the optimum; a boundary penalty keeps the optimum global.
double schwefel(const Eigen::VectorXd& z) {
  const int d = static_cast<int>(z.size());
  const double at_opt = kSchwefelOptimum * std::sin(std::sqrt(kSchwefelOptimum));
  double acc = 0.0;
  double penalty = 0.0;
  for (int i = 0; i < d; ++i) {
    const double y = kSchwefelOptimum + 50.0 * z[i];
    acc += at_opt - y * std::sin(std::sqrt(std::abs(y)));
    const double over = std::abs(y) / 100.0 - 5.0;
    if (over > 0.0) penalty += over * over;
  }
  return acc / (100.0 * d) + 100.0 * penalty;
}

double gallagher(const Eigen::VectorXd& rotated_x, const std::vector<GallagherPeak>& peaks) {
  const double d = static_cast<double>(rotated_x.size());
  double best = 0.0;
  for (const auto& peak : peaks) {
    const Eigen::VectorXd diff = rotated_x - peak.rotated_location;
    const double q = (peak.conditioning.array() * diff.array().square()).sum();
    best = std::max(best, peak.weight * std::exp(-q / (2.0 * d)));
  }
  const double gap = 10.0 - best;
  return gap * gap;
}

}  // namespace

std::span<const CatalogEntry> catalog() { return kCatalog; }

const CatalogEntry& catalog_entry(int function_id) {
  for (const auto& e : kCatalog)
    if (e.id == function_id) return e;
  throw CatalogError("unknown function id " + std::to_string(function_id));
}

std::vector<int> catalog_ids() {
  std::vector<int> ids;
  for (const auto& e : kCatalog) ids.push_back(e.id);
  return ids;
}

EvalBudget::EvalBudget(long limit) : limit_(limit) {
  if (limit <= 0) throw DomainError("evaluation budget limit must be positive");
}

void EvalBudget::require(long n) const {
  if (remaining() < n)
    throw BudgetError("evaluation budget insufficient: need " + std::to_string(n) + ", have " +
                      std::to_string(remaining()));
}

void EvalBudget::consume() {
  if (used_ >= limit_) throw BudgetError("evaluation budget exhausted");
  ++used_;
}

ProblemInstance make_instance(int function_id, int instance_id, int dim) {
  const auto& entry = catalog_entry(function_id);
  if (dim < 2) throw DomainError("dimension must be >= 2");
  if (instance_id < 1) throw DomainError("instance id must be >= 1");

  ProblemInstance inst;
  inst.function_id_ = function_id;
  inst.instance_id_ = instance_id;
  inst.dim_ = dim;

  const std::uint64_t base = derive_seed(0x74726a73656cULL, "instance",
                                         {static_cast<std::uint64_t>(function_id),
                                          static_cast<std::uint64_t>(instance_id),
                                          static_cast<std::uint64_t>(dim)});
  Rng rng(base);
  inst.shift_.resize(dim);
  for (int i = 0; i < dim; ++i) inst.shift_[i] = rng.uniform(-4.0, 4.0);
  inst.f_opt_ = rng.uniform(-100.0, 100.0);

  inst.rotation_seed_ = derive_seed(base, "rotation");
  if (entry.rotated) {
    Rng rot_rng(inst.rotation_seed_);
    inst.rotation_ = random_rotation(rot_rng, dim);
  } else {
    inst.rotation_ = Eigen::MatrixXd::Identity(dim, dim);
  }

  Rng extra(derive_seed(base, "extra"));
  inst.signs_.resize(dim);
  for (int i = 0; i < dim; ++i) inst.signs_[i] = extra.uniform() < 0.5 ? -1.0 : 1.0;

  if (function_id == 21) {
    // Peak 0 sits on the optimum with the unique maximal weight 10.
    std::vector<double> alphas(kGallagherPeaks - 1);
    for (int j = 0; j < kGallagherPeaks - 1; ++j)
      alphas[j] = std::pow(1000.0, 2.0 * j / static_cast<double>(kGallagherPeaks - 2));
    extra.shuffle(alphas.begin(), alphas.end());
    for (int p = 0; p < kGallagherPeaks; ++p) {
      GallagherPeak peak;
      const double alpha = p == 0 ? 1000.0 : alphas[p - 1];
      peak.weight = p == 0 ? 10.0 : 1.1 + 8.0 * (p - 1) / static_cast<double>(kGallagherPeaks - 2);
      if (p == 0) {
        peak.location = inst.shift_;
      } else {
        peak.location.resize(dim);
        for (int i = 0; i < dim; ++i) peak.location[i] = extra.uniform(-4.9, 4.9);
      }
      std::vector<double> exps(dim);
      for (int i = 0; i < dim; ++i) exps[i] = static_cast<double>(i) / (dim - 1);
      extra.shuffle(exps.begin(), exps.end());
      peak.conditioning.resize(dim);
      for (int i = 0; i < dim; ++i) peak.conditioning[i] = std::pow(alpha, exps[i]) / std::pow(alpha, 0.25);
      peak.rotated_location = inst.rotation_ * peak.location;
      inst.peaks_.push_back(std::move(peak));
    }
  }
  return inst;
}

double ProblemInstance::base_value(const Eigen::VectorXd& x) const {
  switch (function_id_) {
    case 1: return sphere(x - shift_);
    case 2: return ellipsoid(x - shift_);
    case 3: return rastrigin(x - shift_);
    case 5: return linear_slope(x - shift_, signs_);
    case 6: return attractive_sector(rotation_ * (x - shift_), signs_);
    case 7: return step_ellipsoid(rotation_ * (x - shift_));
    case 8: {
      const Eigen::VectorXd z = rosenbrock_scale(dim_) * (x - shift_).array() + 1.0;
      return rosenbrock_terms(z);
    }
    case 10: return ellipsoid(rotation_ * (x - shift_));
    case 17: return schaffers_f7(rotation_ * (x - shift_));
    case 19: {
      const Eigen::VectorXd z = (rosenbrock_scale(dim_) * (rotation_ * (x - shift_))).array() + 1.0;
      return griewank_rosenbrock(z);
    }
    case 20: return schwefel(x - shift_);
    case 21: return gallagher(rotation_ * x, peaks_);
    default: break;
  }
  throw CatalogError("unknown function id " + std::to_string(function_id_));
}

double ProblemInstance::value(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DomainError("point has dimension " + std::to_string(x.size()) + ", instance has " +
                      std::to_string(dim_));
  for (double xi : x)
    if (!(xi >= kLower && xi <= kUpper)) throw DomainError("point outside [-5,5]^d");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), dim_);
  return base_value(xv) + f_opt_;
}

double evaluate(const ProblemInstance& instance, std::span<const double> x, EvalBudget& budget) {
  budget.require(1);
  const double f = instance.value(x);
  budget.consume();
  return f;
}

}  // namespace trajsel::bench
