#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace helio {

/// Stable across platforms: FNV-1a over the name, folded into the seed with splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view subsystem);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view subsystem, std::int64_t index);

/// mt19937_64 with hand-rolled distributions so sequences do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace helio
