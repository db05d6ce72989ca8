#pragma once

#include <cstdint>
#include <limits>

namespace tsplab {

// Stream identifiers mixed into the generator key so that independent
// consumers of one seed never share a sequence.
enum class Purpose : std::uint64_t {
  instance = 0x696e7374,
  tour = 0x746f7572,
  search = 0x73726368,
  test = 0x74657374,
};

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator keyed by (seed, stream, purpose).
///
/// Output k is mix64(key + k * golden), so a generator is a pure function of
/// its key and counter. Two generators with different keys are independent
/// for all practical purposes, and a stream can be re-derived anywhere (any
/// thread, any order) without coordination.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0,
               Purpose purpose = Purpose::test) noexcept
      : key_(derive_key(seed, stream, static_cast<std::uint64_t>(purpose))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept {
    // Lemire's multiply-and-reject.
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream,
                                            std::uint64_t purpose) noexcept {
    return mix64(mix64(mix64(seed) ^ purpose) + stream * kGolden);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tsplab
