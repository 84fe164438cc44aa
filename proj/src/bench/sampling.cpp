#include "trajsel/bench/sampling.hpp"

#include <array>
#include <bit>

#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"

namespace trajsel::bench {

namespace {

constexpr int kBits = 32;

struct Primitive {
  int degree;
  unsigned coeffs;
  std::array<unsigned, 5> m;
};

// Joe & Kuo direction numbers for dimensions 2..10.
constexpr std::array<Primitive, kMaxSobolDim - 1> kPrimitives{{
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
}};

std::array<std::uint32_t, kBits> directions(int dim_index) {
  std::array<std::uint32_t, kBits> v{};
  if (dim_index == 0) {
    for (int i = 0; i < kBits; ++i) v[i] = 1u << (kBits - 1 - i);
    return v;
  }
  const auto& p = kPrimitives[dim_index - 1];
  const int s = p.degree;
  for (int i = 0; i < s; ++i) v[i] = p.m[i] << (kBits - 1 - i);
  for (int i = s; i < kBits; ++i) {
    v[i] = v[i - s] ^ (v[i - s] >> s);
    for (int k = 1; k < s; ++k)
      if ((p.coeffs >> (s - 1 - k)) & 1u) v[i] ^= v[i - k];
  }
  return v;
}

std::vector<std::vector<std::uint32_t>> sobol_integers(std::size_t count, int dim) {
  if (dim < 1 || dim > kMaxSobolDim) throw DomainError("Sobol dimension out of range");
  std::vector<std::array<std::uint32_t, kBits>> dirs;
  for (int j = 0; j < dim; ++j) dirs.push_back(directions(j));
  std::vector<std::vector<std::uint32_t>> out(count, std::vector<std::uint32_t>(dim));
  std::vector<std::uint32_t> x(dim, 0);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = x;
    // Gray-code step: flip the direction of the lowest zero bit of k.
    const int c = std::countr_one(static_cast<std::uint64_t>(k));
    if (c >= kBits) throw DomainError("Sobol sequence exhausted");
    for (int j = 0; j < dim; ++j) x[j] ^= dirs[j][c];
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> sobol_points(std::size_t count, int dim) {
  auto ints = sobol_integers(count, dim);
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  for (std::size_t k = 0; k < count; ++k)
    for (int j = 0; j < dim; ++j) out[k][j] = static_cast<double>(ints[k][j]) * 0x1.0p-32;
  return out;
}

std::vector<std::vector<double>> unit_design(std::size_t count, int dim, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "design", {static_cast<std::uint64_t>(dim)}));
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  if (dim <= kMaxSobolDim) {
    // Random digital shift: keeps the net structure, one stream per seed.
    std::vector<std::uint32_t> shift(dim);
    for (auto& s : shift) s = static_cast<std::uint32_t>(rng.next_u64() >> 32);
    auto ints = sobol_integers(count, dim);
    for (std::size_t k = 0; k < count; ++k)
      for (int j = 0; j < dim; ++j) out[k][j] = static_cast<double>(ints[k][j] ^ shift[j]) * 0x1.0p-32;
    return out;
  }
  std::vector<std::size_t> strata(count);
  for (int j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < count; ++k) strata[k] = k;
    rng.shuffle(strata.begin(), strata.end());
    for (std::size_t k = 0; k < count; ++k)
      out[k][j] = (static_cast<double>(strata[k]) + rng.uniform()) / static_cast<double>(count);
  }
  return out;
}

std::vector<Sample> low_discrepancy_sample(const ProblemInstance& instance, int k, std::uint64_t seed,
                                           EvalBudget& budget) {
  if (k < 1) throw DomainError("sample size must be >= 1");
  budget.require(k);
  const auto unit = unit_design(static_cast<std::size_t>(k), instance.dim(), seed);
  std::vector<Sample> out;
  out.reserve(k);
  for (const auto& u : unit) {
    Sample s;
    s.point.resize(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) s.point[j] = kLower + (kUpper - kLower) * u[j];
    s.fitness = evaluate(instance, s.point, budget);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace trajsel::bench
