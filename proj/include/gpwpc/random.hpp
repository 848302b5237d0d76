#pragma once

#include <cstdint>
#include <limits>

namespace gpwpc {

/// Identifies one reproducible random sequence. Two streams with the same
/// (seed, substream) produce the same draws on every platform.
struct RandomStream {
  std::uint64_t seed = 0;
  std::uint64_t substream = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based generator: the i-th output is a keyed hash of i, so any
/// substream can be opened independently without sharing state.
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(RandomStream stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
  double standard_normal() noexcept;
  bool coin() noexcept { return ((*this)() >> 63) != 0; }

  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gpwpc
