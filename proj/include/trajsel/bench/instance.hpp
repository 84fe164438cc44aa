#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace trajsel::bench {

inline constexpr double kLower = -5.0;
inline constexpr double kUpper = 5.0;

struct CatalogEntry {
  int id;                  // BBOB-style function number
  std::string_view name;
  std::string_view group;  // one of the five BBOB function groups
  bool rotated;
};

/// The 12-function suite, ordered by id.
std::span<const CatalogEntry> catalog();
/// Throws CatalogError for ids outside the suite.
const CatalogEntry& catalog_entry(int function_id);
std::vector<int> catalog_ids();

/// Counts fitness evaluations against a hard limit.
class EvalBudget {
 public:
  explicit EvalBudget(long limit);

  long used() const { return used_; }
  long limit() const { return limit_; }
  long remaining() const { return limit_ - used_; }

  /// Throws BudgetError if fewer than n evaluations remain.
  void require(long n) const;
  /// Consumes exactly one evaluation; throws BudgetError when exhausted.
  void consume();

 private:
  long used_ = 0;
  long limit_;
};

struct GallagherPeak {
  Eigen::VectorXd location;
  Eigen::VectorXd rotated_location;  // rotation * location
  Eigen::VectorXd conditioning;      // diagonal of C_i
  double weight;
};

/// Shifted/rotated benchmark function. Immutable once built.
class ProblemInstance {
 public:
  int function_id() const { return function_id_; }
  int instance_id() const { return instance_id_; }
  int dim() const { return dim_; }
  const Eigen::VectorXd& shift() const { return shift_; }
  const Eigen::MatrixXd& rotation() const { return rotation_; }
  double f_opt() const { return f_opt_; }
  std::uint64_t rotation_seed() const { return rotation_seed_; }

  /// Raw objective without budget accounting; x must lie in the domain.
  double value(std::span<const double> x) const;

 private:
  friend ProblemInstance make_instance(int function_id, int instance_id, int dim);

  double base_value(const Eigen::VectorXd& x) const;

  int function_id_ = 0;
  int instance_id_ = 0;
  int dim_ = 0;
  Eigen::VectorXd shift_;
  Eigen::MatrixXd rotation_;
  double f_opt_ = 0.0;
  std::uint64_t rotation_seed_ = 0;
  // function-specific data
  Eigen::VectorXd signs_;
  std::vector<GallagherPeak> peaks_;
};

ProblemInstance make_instance(int function_id, int instance_id, int dim);

/// Evaluates x (length dim, inside [-5,5]^d) and charges one evaluation.
double evaluate(const ProblemInstance& instance, std::span<const double> x, EvalBudget& budget);

}  // namespace trajsel::bench
