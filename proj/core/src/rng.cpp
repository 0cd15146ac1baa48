#include "sausage/rng.hpp"

#include <stdexcept>

namespace sausage {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
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

void Philox4x32::refill() {
  block_ = block(counter_, key_);
  next_ = 0;
  if (++counter_[0] == 0) {
    // 2^32 blocks exhausted; continue in the reserved upper half of word 2.
    counter_[2] += 0x00010000u * 0x8000u;
  }
}

Philox4x32 seed_stream(std::uint64_t master_seed, StreamLabel label, std::uint64_t index) {
  if (index > kMaxStreamIndex) {
    throw std::out_of_range("seed_stream: task index exceeds 48 bits");
  }
  const Philox4x32::Key key{static_cast<std::uint32_t>(master_seed),
                            static_cast<std::uint32_t>(master_seed >> 32)};
  const Philox4x32::Counter counter{0u, static_cast<std::uint32_t>(index),
                                    static_cast<std::uint32_t>(index >> 32) & 0xFFFFu,
                                    static_cast<std::uint32_t>(label)};
  return Philox4x32(key, counter);
}

}  // namespace sausage
