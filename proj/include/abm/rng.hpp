#pragma once

// Portable pseudo-random source shared by every stochastic operation in the engine.
//
// Generator: xoshiro256** 1.0 (Blackman & Vigna).
// Seeding:   the four state words are four successive outputs of splitmix64 started at `seed`.
// Floats:    (next_u64() >> 11) * 2^-53, uniform on [0, 1) with 53 random mantissa bits.
// Bounded:   Lemire's multiply-shift with rejection. With m = x * n as a 128-bit product and
//            l = low 64 bits of m, reject while l < (2^64 - n) mod n, redrawing x; return m >> 64.
// Shuffle:   Fisher-Yates, i from size-1 down to 1, j = next_below(i + 1), swap(a[i], a[j]).
//
// Every step above is integer arithmetic, so streams are identical on every platform.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

#include "abm/errors.hpp"

namespace abm {

/// One splitmix64 step: advances `state` and returns the mixed output.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// First splitmix64 output for a given starting state.
constexpr std::uint64_t splitmix64_once(std::uint64_t seed) noexcept { return splitmix64(seed); }

struct RngState {
  std::array<std::uint64_t, 4> s{};
  friend bool operator==(const RngState&, const RngState&) = default;
};

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept { reseed(seed); }

  /// Restores a saved state. An all-zero state is a contract violation.
  explicit Rng(const RngState& state) : state_(state) {
    if (state.s == std::array<std::uint64_t, 4>{}) throw ContractViolation("xoshiro256** state must not be all zero");
  }

  void reseed(std::uint64_t seed) noexcept {
    for (auto& w : state_.s) w = splitmix64(seed);
    // splitmix64 never yields four zero words in a row, but keep the invariant explicit.
    if (state_.s == std::array<std::uint64_t, 4>{}) state_.s[0] = 1;
  }

  [[nodiscard]] const RngState& state() const noexcept { return state_; }

  std::uint64_t next_u64() noexcept {
    auto& s = state_.s;
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  double next_float() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw ContractViolation("next_below requires n >= 1");
    std::uint64_t x = next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = next_u64();
        m = static_cast<unsigned __int128>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) noexcept { return next_float() < p; }

  /// Uniform real on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_float(); }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(next_below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  template <class Container>
  void shuffle(Container& c) {
    shuffle(std::span{c.data(), c.size()});
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  RngState state_;
};

}  // namespace abm
