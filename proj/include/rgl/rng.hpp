#pragma once

#include <cstdint>

namespace rgl {

/// Counter-based random stream keyed by (seed, stream id, index). Two streams
/// with the same key produce the same sequence regardless of how many other
/// streams were drawn before, which makes column-wise generation
/// order-independent.
class KeyedStream {
 public:
  KeyedStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t index) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  /// +1 or -1 with equal probability.
  double sign() noexcept { return (next_u64() >> 63) != 0 ? 1.0 : -1.0; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Stream identifiers used across the library.
inline constexpr std::uint64_t kGaussianSketchStream = 0x6761757373ULL;
inline constexpr std::uint64_t kSparseSignSketchStream = 0x7370617273ULL;
inline constexpr std::uint64_t kSolutionStream = 0x78737461ULL;
inline constexpr std::uint64_t kRhsStream = 0x726873ULL;
inline constexpr std::uint64_t kInitialGuessStream = 0x7830ULL;

}  // namespace rgl
