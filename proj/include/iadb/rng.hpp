#pragma once

#include <cstdint>
#include <string_view>

namespace iadb {

/// splitmix64 (Vigna, public domain). Used to expand seeds into generator
/// state and to hash stream labels.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

/// Derives the seed of a named sub-stream from a root seed. Streams are keyed
/// by a purpose label (and optionally an index), so adding a new consumer
/// never perturbs the draws seen by existing ones.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index);

/// xoshiro256++ seeded via splitmix64. All floating-point draws are produced
/// with fixed arithmetic (no std::*_distribution), so sequences are
/// bit-reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [a, b).
  double uniform(double a, double b);
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal draw (Box-Muller, cached spare).
  double normal();

  /// Named sub-stream rooted at this generator's seed.
  Rng stream(std::string_view label) const;
  Rng stream(std::string_view label, std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace iadb
