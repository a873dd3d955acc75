#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al. 2011).
//
// A stream is identified by (seed, stream id); the id occupies the upper half
// of the 128-bit counter, so distinct ids never overlap. Monte Carlo drivers
// give sample k its own stream k, which makes results independent of how the
// samples are spread over threads.

#include <array>
#include <cstdint>

namespace bseries {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key) noexcept;
};

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Uniform on (0, 1).
  double uniform_open() noexcept;

  /// Uniform integer on [lo, hi] without modulo bias.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept;

  /// Unit-rate exponential.
  double exponential() noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Block buffer_{};
  int used_ = 4;
};

}  // namespace bseries
