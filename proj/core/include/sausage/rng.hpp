#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sausage {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The generator is a pure function of (key, counter); a stream is fixed by
/// its key and the upper three counter words, and advances by incrementing
/// the lowest counter word. Satisfies UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(Key key, Counter counter) : key_(key), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (next_ == 4) refill();
    return block_[next_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t hi = (*this)() >> 5;
    const std::uint64_t lo = (*this)() >> 6;
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1]; safe to pass to log().
  double uniform_positive() { return 1.0 - uniform(); }

  /// One Philox4x32-10 bijection, exposed for known-answer testing.
  static Counter block(Counter counter, Key key);

  const Key& key() const { return key_; }
  const Counter& counter() const { return counter_; }

 private:
  void refill();

  Key key_;
  Counter counter_;
  Counter block_{};
  int next_ = 4;
};

/// Labels that partition the counter space of a master seed into independent
/// families of streams. The numeric values are part of the on-disk
/// reproducibility contract and must never be renumbered.
enum class StreamLabel : std::uint32_t {
  kPath = 1,
  kField = 2,
  kFieldPath = 3,
  kObstacleTail = 4,
  kGraph = 5,
  kSubset = 6,
  kTestFunction = 7,
};

/// Largest admissible per-label task index (48 bits).
inline constexpr std::uint64_t kMaxStreamIndex = (std::uint64_t{1} << 48) - 1;

/// Derives the stream for task `index` under `label` of `master_seed`.
///
/// key = (low, high) 32-bit halves of the master seed; counter word 0 is the
/// running block counter, word 1 holds the low 32 bits of the index, word 2
/// the high 16 bits of the index, word 3 the label. Distinct (label, index)
/// pairs therefore never share a counter. Throws std::out_of_range when
/// index > kMaxStreamIndex.
Philox4x32 seed_stream(std::uint64_t master_seed, StreamLabel label, std::uint64_t index);

}  // namespace sausage
