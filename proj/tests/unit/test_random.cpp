#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dyner/random.hpp"

using dyner::Stream;

// Reference SplitMix64 started at state 0 (Vigna's splitmix64.c).
TEST(Random, MatchesReferenceSplitMix64) {
  Stream s(0);
  EXPECT_EQ(s.next_u64(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(s.next_u64(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(s.next_u64(), 0x06C45D188009454FULL);
  EXPECT_EQ(s.position(), 3u);
}

TEST(Random, DrawIsPureFunctionOfKeyAndCounter) {
  Stream a(12345);
  Stream b(12345);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  Stream c(12345);
  for (int i = 0; i < 7; ++i) c.next_u64();
  EXPECT_EQ(c.next_u64(), dyner::mix64(12345 + 8 * 0x9E3779B97F4A7C15ULL));
}

TEST(Random, DeriveKeyFollowsDocumentedFold) {
  const std::uint64_t k0 = dyner::mix64(42);
  const std::uint64_t k1 = dyner::mix64(k0 ^ (3 * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL));
  EXPECT_EQ(dyner::derive_key(42, {3}), k1);
  EXPECT_EQ(dyner::edge_stream(42, 0, 1, 2).key(), dyner::derive_key(42, {0, 1, 2}));
}

TEST(Random, EdgeStreamsAreDistinct) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t r = 0; r < 4; ++r)
    for (std::uint64_t i = 0; i < 20; ++i)
      for (std::uint64_t j = i; j < 20; ++j) keys.insert(dyner::edge_stream(7, r, i, j).key());
  EXPECT_EQ(keys.size(), 4u * 210u);
  EXPECT_NE(dyner::aux_stream(7, 0).key(), dyner::edge_stream(7, 0, 0, 0).key());
}

TEST(Random, UniformAndExponentialMoments) {
  Stream s(99);
  const int n = 200000;
  double su = 0.0;
  double se = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    se += s.exponential(2.0);
  }
  EXPECT_NEAR(su / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(se / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}

TEST(Random, NormalMoments) {
  Stream s(5);
  const int n = 200000;
  double m1 = 0.0;
  double m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
  }
  EXPECT_NEAR(m1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}
