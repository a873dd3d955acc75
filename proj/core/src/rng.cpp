#include "bseries/rng.hpp"

#include <cmath>

namespace bseries {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Block Philox4x32::generate(Block ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

void StreamRng::refill() noexcept {
  const Philox4x32::Block ctr = {static_cast<std::uint32_t>(block_index_), static_cast<std::uint32_t>(block_index_ >> 32),
                                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  buffer_ = Philox4x32::generate(ctr, key_);
  ++block_index_;
  used_ = 0;
}

std::uint64_t StreamRng::next_u64() noexcept {
  if (used_ >= 4) refill();
  const std::uint64_t v = (static_cast<std::uint64_t>(buffer_[used_]) << 32) | buffer_[used_ + 1];
  used_ += 2;
  return v;
}

double StreamRng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double StreamRng::uniform_open() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t StreamRng::uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
  const std::uint64_t range = hi - lo;
  if (range == UINT64_MAX) return next_u64();
  const std::uint64_t span = range + 1;
  // 2^64 mod span; values below it would bias the low residues.
  const std::uint64_t threshold = (0 - span) % span;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v < threshold);
  return lo + v % span;
}

double StreamRng::exponential() noexcept { return -std::log(uniform_open()); }

}  // namespace bseries
