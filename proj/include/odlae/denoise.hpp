#pragma once

#include <span>
#include <string>

#include "odlae/numerics.hpp"
#include "odlae/rng.hpp"

namespace odlae {

// Stochastic input corruption x -> x~.
struct CorruptionPolicy {
  enum class Kind { none, masking, gaussian };

  Kind kind = Kind::none;
  double rate = 0.0;   // masking: probability a coordinate is zeroed
  double sigma = 0.0;  // gaussian: noise standard deviation

  static CorruptionPolicy none() { return {}; }
  static CorruptionPolicy masking(double p) { return {Kind::masking, p, 0.0}; }
  static CorruptionPolicy gaussian(double s) { return {Kind::gaussian, 0.0, s}; }

  // "none", "mask:<p>" or "gauss:<sigma>".
  static CorruptionPolicy parse(const std::string& text);
  std::string to_string() const;

  bool active() const noexcept { return kind != Kind::none; }
  void validate() const;

  friend bool operator==(const CorruptionPolicy&, const CorruptionPolicy&) = default;
};

// Masking zeroes each coordinate independently with probability `rate`;
// gaussian adds N(0, sigma^2) and clamps to [0, 1]; none copies. Draws one
// uniform (masking) or one normal (gaussian) per coordinate, none for `none`.
Vector corrupt(std::span<const double> x, const CorruptionPolicy& policy, Rng& rng);

}  // namespace odlae
