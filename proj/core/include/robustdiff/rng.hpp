#pragma once

#include <cstdint>

#include "robustdiff/vec.hpp"

namespace robustdiff {

/// Counter-based pseudo-random generator (SplitMix64 output function over a
/// keyed counter). The same (seed, stream) pair yields a bit-identical sample
/// stream on every platform: uniform draws are pure integer arithmetic and
/// normal draws go through the polar transform with an in-house log so no
/// libm rounding differences leak in.
///
/// Instances are cheap value types. `split` derives an independent substream,
/// which is how parallel grid cells obtain decorrelated randomness from one
/// master seed. An Rng is single-owner; never share one across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  /// Uniform draw in [0, 1) with 53 random mantissa bits.
  double next_uniform();

  /// Standard normal draw (Marsaglia polar method).
  double next_normal();

  /// Unbiased uniform integer in [0, bound). bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);

  /// Independent substream keyed by `stream_tag`; does not advance *this.
  Rng split(std::uint64_t stream_tag) const;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// n i.i.d. standard normal samples. n must be >= 1.
Vector randn(Rng& rng, std::size_t n);

/// Natural log via argument reduction + atanh series; uses only IEEE basic
/// operations so results are identical across platforms. Requires x > 0.
double deterministic_log(double x);

}  // namespace robustdiff
