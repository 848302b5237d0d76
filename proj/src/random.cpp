#include "gpwpc/random.hpp"

#include <cmath>
#include <numbers>

namespace gpwpc {

std::uint64_t mix64(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

CounterRng::CounterRng(RandomStream stream) noexcept
    : key_(mix64(mix64(stream.seed ^ 0x6A09E667F3BCC909ULL) + stream.substream * 0xD1B54A32D192ED03ULL)) {}

double CounterRng::standard_normal() noexcept {
  // Box-Muller, one variate per call keeps the stream position a pure
  // function of the number of draws.
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gpwpc
