#include "rgl/rng.hpp"

#include <cmath>
#include <numbers>

namespace rgl {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

KeyedStream::KeyedStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index) noexcept
    : key_(splitmix64(splitmix64(splitmix64(seed) ^ stream_id) ^ index)) {}

std::uint64_t KeyedStream::next_u64() noexcept {
  return splitmix64(key_ + 0x632be59bd9b4e019ULL * ++counter_);
}

double KeyedStream::uniform() noexcept {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t KeyedStream::below(std::uint64_t bound) noexcept {
  return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * bound) >> 64);
}

double KeyedStream::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

}  // namespace rgl
