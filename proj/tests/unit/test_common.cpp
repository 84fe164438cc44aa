#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "trajsel/common/errors.hpp"
#include "trajsel/common/rng.hpp"
#include "trajsel/common/stats.hpp"

using namespace trajsel;

TEST_CASE("derived seeds depend on every input") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m : {0ULL, 1ULL})
    for (auto tag : {"a", "b"})
      for (std::uint64_t c : {0ULL, 1ULL, 2ULL}) seen.insert(derive_seed(m, tag, {c}));
  CHECK(seen.size() == 12);
  CHECK(derive_seed(7, "x", {1, 2}) == derive_seed(7, "x", {1, 2}));
  CHECK(derive_seed(7, "x", {1, 2}) != derive_seed(7, "x", {2, 1}));
}

TEST_CASE("rng uniform and normal moments") {
  Rng rng(42);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
}

TEST_CASE("median, moments and ranks") {
  std::vector<double> odd{3, 1, 2};
  std::vector<double> even{4, 1, 3, 2};
  CHECK(stats::median(odd) == 2.0);
  CHECK(stats::median(even) == 2.5);
  std::vector<double> constant(5, 3.0);
  CHECK(stats::skewness(constant) == 0.0);
  CHECK(stats::kurtosis(constant) == 0.0);
  std::vector<double> ties{10, 20, 10, 5};
  auto r = stats::average_ranks(ties);
  CHECK(r == std::vector<double>{2.5, 4, 2.5, 1});
  CHECK_THROWS_AS(stats::median(std::vector<double>{}), DomainError);
}
