#include "robustdiff/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace robustdiff {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double deterministic_log(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("deterministic_log: argument must be positive and finite");
  }
  int exponent = 0;
  double m = std::frexp(x, &exponent);  // x = m * 2^e, m in [0.5, 1)
  // Re-center m into [sqrt(1/2), sqrt(2)) so |z| stays small.
  if (m < 0.70710678118654752440) {
    m *= 2.0;
    exponent -= 1;
  }
  const double z = (m - 1.0) / (m + 1.0);
  const double z2 = z * z;
  // ln(m) = 2 atanh(z); |z| <= 0.1716 so nine odd terms reach full precision.
  double series = 1.0 / 17.0;
  series = series * z2 + 1.0 / 15.0;
  series = series * z2 + 1.0 / 13.0;
  series = series * z2 + 1.0 / 11.0;
  series = series * z2 + 1.0 / 9.0;
  series = series * z2 + 1.0 / 7.0;
  series = series * z2 + 1.0 / 5.0;
  series = series * z2 + 1.0 / 3.0;
  series = series * z2 + 1.0;
  constexpr double kLn2 = 0.69314718055994530942;
  return 2.0 * z * series + static_cast<double>(exponent) * kLn2;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ (mix64(stream + kGolden) + kGolden))) {}

std::uint64_t Rng::next_u64() {
  counter_ += 1;
  return mix64(key_ + counter_ * kGolden);
}

double Rng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * next_uniform() - 1.0;
    v = 2.0 * next_uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * deterministic_log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  std::uint64_t r = 0;
  do {
    r = next_u64();
  } while (r < threshold);
  return r % bound;
}

Rng Rng::split(std::uint64_t stream_tag) const {
  Rng child(0);
  child.key_ = mix64(key_ ^ (mix64(stream_tag) + kGolden));
  return child;
}

Vector randn(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("randn: n must be >= 1");
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rng.next_normal();
  return out;
}

}  // namespace robustdiff
