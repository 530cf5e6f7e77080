#pragma once

#include <cstdint>
#include <initializer_list>
#include <cmath>
#include <random>

namespace jitter {

/// SplitMix64 finalizer. Used to derive statistically independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t v) noexcept {
  v += 0x9E3779B97F4A7C15ULL;
  v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ULL;
  v = (v ^ (v >> 27)) * 0x94D049BB133111EBULL;
  return v ^ (v >> 31);
}

/// Derive a child seed from a parent seed and a path of indices, e.g.
/// derive_seed(master, {cell, trial}). Equal paths always give equal seeds.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(parent);
  for (auto idx : path) s = mix64(s ^ mix64(idx + 0x632BE59BD9B4E019ULL));
  return s;
}

/// Seeded random stream. Wraps mt19937_64 with the handful of draws the
/// samplers need; every draw is a deterministic function of the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    // 53 random mantissa bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Exponential with the given rate.
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace jitter
