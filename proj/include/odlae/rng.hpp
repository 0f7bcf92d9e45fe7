#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace odlae {

// Counter-based generator: output i is a SplitMix64 finalization of
// seed + (i+1)*golden. The whole state is (seed, counter), so a generator
// can be checkpointed and replayed exactly, and it produces the same
// stream on any platform with IEEE doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller; consumes exactly two draws.
  double normal();
  // Unbiased integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  // Independent generator keyed by a tag; does not advance this one.
  Rng derive(std::uint64_t tag) const;
  Rng derive(std::string_view tag) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

std::uint64_t splitmix64(std::uint64_t x);
// FNV-1a, used to turn string tags into derivation keys.
std::uint64_t hash_tag(std::string_view tag);

}  // namespace odlae
