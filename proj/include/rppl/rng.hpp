#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace rppl {

/// Seeded RNG with documented sub-stream derivation. Every random choice in
/// the toolkit draws from a stream derived as derive(base_seed, purpose,
/// indices...), so re-running any stage with the same config replays the
/// exact same values regardless of what ran before it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free multiply-shift (Lemire); bias below 2^-64 is irrelevant
    // at our sample counts and keeps the draw a single engine call.
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller. Stateless between calls (no cached
  /// spare) so the draw count per sample is fixed.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Derive an independent sub-seed from a base seed, a purpose tag and up to
/// three integer indices (region, repeat, epoch, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose,
                                 std::uint64_t a = 0, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  std::uint64_t h = detail::mix64(base);
  for (char ch : purpose) h = detail::mix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(ch)));
  h = detail::mix64(h ^ a);
  h = detail::mix64(h ^ b);
  h = detail::mix64(h ^ c);
  return h;
}

}  // namespace rppl
