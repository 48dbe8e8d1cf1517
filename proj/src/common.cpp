#include "oi/common.hpp"

namespace oi {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) {
  // Two splitmix passes decorrelate (seed, index) pairs that differ in only
  // one component.
  std::uint64_t st = master_seed;
  std::uint64_t mixed = splitmix64(st);
  st = mixed ^ (stream_index * kGolden + 0x632BE59BD9B4E019ULL);
  for (auto& word : s_) word = splitmix64(st);
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint32_t RandomStream::uniform_below(std::uint32_t bound) {
  // Multiply-shift; bias is < 2^-32 per draw which is far below every
  // statistical tolerance used here.
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

}  // namespace oi
