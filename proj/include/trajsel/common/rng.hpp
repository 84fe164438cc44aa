#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace trajsel {

/// Counter-based seed derivation: hash(master, tag, counters...).
/// Every stochastic component gets its seed from here, never from global state.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::initializer_list<std::uint64_t> counters = {});

std::uint64_t splitmix64(std::uint64_t x);

/// Random stream with portable conversions. std::*_distribution output is
/// implementation-defined, so uniform and normal draws are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  /// Standard normal via the Marsaglia polar method.
  double normal();

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace trajsel
