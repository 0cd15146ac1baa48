#include <set>
#include <stdexcept>

#include "doctest.h"
#include "sausage/parallel.hpp"
#include "sausage/rng.hpp"
#include "sausage/stats.hpp"

using namespace sausage;

TEST_CASE("philox known-answer vectors") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::block(C{0, 0, 0, 0}, K{0, 0}) ==
        C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::block(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                          K{0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::block(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          K{0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("seed_stream is a pure function of its inputs") {
  auto a = seed_stream(42, StreamLabel::kPath, 7);
  auto b = seed_stream(42, StreamLabel::kPath, 7);
  for (int i = 0; i < 64; ++i) CHECK(a() == b());
}

TEST_CASE("distinct streams have distinct prefixes") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 10'000; ++k) {
    auto rng = seed_stream(1, StreamLabel::kPath, k);
    const std::uint64_t head = (std::uint64_t{rng()} << 32) | rng();
    seen.insert(head);
  }
  CHECK(seen.size() == 10'000);
  auto p = seed_stream(1, StreamLabel::kPath, 3);
  auto f = seed_stream(1, StreamLabel::kField, 3);
  CHECK(p() != f());
}

TEST_CASE("stream index overflow is rejected") {
  CHECK_NOTHROW(seed_stream(1, StreamLabel::kPath, kMaxStreamIndex));
  CHECK_THROWS_AS(seed_stream(1, StreamLabel::kPath, kMaxStreamIndex + 1), std::out_of_range);
}

TEST_CASE("uniform draws lie in [0, 1) with the right mean") {
  auto rng = seed_stream(9, StreamLabel::kTestFunction, 0);
  RunningStats stats;
  for (int i = 0; i < 200'000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    stats.add(u);
  }
  const Estimate e = stats.estimate();
  CHECK(std::abs(e.value - 0.5) <= 3.0 * e.se);
}

TEST_CASE("parallel_for result does not depend on the worker count") {
  auto run = [](unsigned workers) {
    std::vector<double> out(5000);
    parallel_for(out.size(), workers, [&](std::size_t i) {
      auto rng = seed_stream(5, StreamLabel::kPath, i);
      out[i] = rng.uniform();
    });
    return summarize(out);
  };
  const Estimate one = run(1), four = run(4);
  CHECK(one.value == four.value);
  CHECK(one.se == four.se);
}
