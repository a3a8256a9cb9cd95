#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "shufflesgd/error.hpp"
#include "shufflesgd/permutation.hpp"

using namespace shufflesgd;

namespace {

std::vector<Permutation::value_type> values_of(const Permutation& p) {
  return {p.values().begin(), p.values().end()};
}

}  // namespace

TEST(Splitmix64, MatchesReferenceOutput) {
  EXPECT_EQ(splitmix64_mix(0), 0xe220a8397b1dcdafULL);
}

TEST(Xoshiro, MatchesReferenceFromSmallState) {
  RngStream s(RngStream::State{1, 2, 3, 4}, Lineage{});
  EXPECT_EQ(s.next(), 11520ULL);
  EXPECT_EQ(s.next(), 0ULL);
  EXPECT_EQ(s.next(), 1509978240ULL);
  EXPECT_EQ(s.next(), 1215971899390074240ULL);
}

TEST(Xoshiro, RejectsAllZeroState) {
  EXPECT_THROW(RngStream(RngStream::State{0, 0, 0, 0}, Lineage{}), UsageError);
}

TEST(DeriveStream, GoldenStates) {
  EXPECT_EQ(derive_stream(0, 0, 0).state(),
            (RngStream::State{0x2130748aaac80268ULL, 0x0cc78fb979ce5090ULL, 0xab9aa3dafba6b4acULL,
                              0xb0c750a86b3b1dd2ULL}));
  EXPECT_EQ(derive_stream(0, 0, 1).state(),
            (RngStream::State{0xd9eef7f073d37c42ULL, 0x2fcbde10b6f7c951ULL, 0x745c2166ab4c890eULL,
                              0xff65cc6b3e94672eULL}));
  EXPECT_EQ(derive_stream(12345, 3, 7).state(),
            (RngStream::State{0x08f1134a0faaa7f1ULL, 0x4aff73f38f84f02fULL, 0x16d50f15e6c21e6eULL,
                              0xacc1b339aca447bbULL}));
}

TEST(DeriveStream, GoldenOutputs) {
  RngStream s = derive_stream(0, 0, 0);
  EXPECT_EQ(s.next(), 0x8a21cd34a214a917ULL);
  EXPECT_EQ(s.next(), 0x9c507e12243e64d0ULL);
  EXPECT_EQ(s.next(), 0xc3763b828e49dc84ULL);
  EXPECT_EQ(s.next(), 0x103c72cbff1eb4b5ULL);
}

TEST(DeriveStream, LineageIsRecordedAndOverloadsAgree) {
  const Lineage lin{12345, 3, 7};
  RngStream a = derive_stream(lin);
  RngStream b = derive_stream(12345, 3, 7);
  EXPECT_EQ(a.state(), b.state());
  EXPECT_EQ(a.lineage().base_seed, 12345u);
  EXPECT_EQ(a.lineage().sweep_index, 3u);
  EXPECT_EQ(a.lineage().repeat_index, 7u);
}

TEST(DeriveStream, DistinctLineagesGiveDistinctStates) {
  std::set<RngStream::State> seen;
  for (std::uint64_t b = 0; b < 4; ++b)
    for (std::uint64_t s = 0; s < 4; ++s)
      for (std::uint64_t r = 0; r < 4; ++r) seen.insert(derive_stream(b, s, r).state());
  EXPECT_EQ(seen.size(), 64u);
}

TEST(Bounded, GoldenDraws) {
  RngStream s = derive_stream(42, 1, 2);
  std::vector<std::uint64_t> got;
  for (int k = 0; k < 8; ++k) got.push_back(s.bounded(7));
  EXPECT_EQ(got, (std::vector<std::uint64_t>{6, 0, 2, 5, 0, 1, 4, 5}));
}

TEST(Bounded, StaysInRangeAndRejectsZero) {
  RngStream s = derive_stream(1, 2, 3);
  for (std::uint64_t n : {1ULL, 2ULL, 3ULL, 1000ULL, (1ULL << 63) + 1}) {
    for (int k = 0; k < 200; ++k) EXPECT_LT(s.bounded(n), n);
  }
  EXPECT_THROW(s.bounded(0), UsageError);
}

TEST(Uniform01, InHalfOpenUnitInterval) {
  RngStream s = derive_stream(9, 9, 9);
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double u = s.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_LT(lo, 0.01);
  EXPECT_GT(hi, 0.99);
}

TEST(Shuffle, GoldenSequenceN10) {
  RngStream s = derive_stream(0, 0, 0);
  EXPECT_EQ(values_of(shuffle(s, 10)),
            (std::vector<Permutation::value_type>{3, 6, 7, 4, 2, 10, 9, 5, 1, 8}));
  EXPECT_EQ(values_of(shuffle(s, 10)),
            (std::vector<Permutation::value_type>{9, 7, 8, 2, 10, 3, 4, 1, 6, 5}));
  EXPECT_EQ(values_of(shuffle(s, 10)),
            (std::vector<Permutation::value_type>{9, 10, 5, 6, 3, 4, 1, 2, 8, 7}));
}

TEST(Shuffle, ShuffleIntoMatchesShuffle) {
  RngStream a = derive_stream(5, 0, 0);
  RngStream b = derive_stream(5, 0, 0);
  Permutation p = Permutation::identity(10);
  for (int k = 0; k < 5; ++k) {
    shuffle_into(a, p);
    EXPECT_EQ(p, shuffle(b, 10));
  }
}

TEST(Shuffle, SingletonAndZero) {
  RngStream s = derive_stream(0, 0, 0);
  EXPECT_EQ(values_of(shuffle(s, 1)), (std::vector<Permutation::value_type>{1}));
  EXPECT_THROW(shuffle(s, 0), UsageError);
}

TEST(Shuffle, AllPermutationsOfFourAreUniform) {
  // 24 cells, 240000 draws; chi-square(23) exceeds 70.55 with probability 1e-6.
  RngStream s = derive_stream(2024, 0, 0);
  std::map<std::vector<Permutation::value_type>, int> tally;
  const int draws = 240000;
  for (int k = 0; k < draws; ++k) ++tally[values_of(shuffle(s, 4))];
  ASSERT_EQ(tally.size(), 24u);
  const double expected = draws / 24.0;
  double chi2 = 0.0;
  for (const auto& [perm, count] : tally) chi2 += (count - expected) * (count - expected) / expected;
  EXPECT_LT(chi2, 70.55);
}

TEST(Shuffle, PositionMarginalsAreUniform) {
  // Value in position 1 for n = 10; chi-square(9) exceeds 44.81 with probability 1e-6.
  RngStream s = derive_stream(7, 7, 7);
  std::vector<int> tally(11, 0);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) ++tally[shuffle(s, 10)(1)];
  double chi2 = 0.0;
  for (int v = 1; v <= 10; ++v) chi2 += (tally[v] - draws / 10.0) * (tally[v] - draws / 10.0) / (draws / 10.0);
  EXPECT_LT(chi2, 44.81);
}

TEST(PermutationTest, ValidatesValues) {
  EXPECT_NO_THROW(Permutation({2, 1, 3}));
  EXPECT_THROW(Permutation({1, 1, 3}), UsageError);
  EXPECT_THROW(Permutation({0, 1, 2}), UsageError);
  EXPECT_THROW(Permutation({1, 2, 4}), UsageError);
}

TEST(PermutationTest, OneBasedAccess) {
  const Permutation p({3, 1, 2});
  EXPECT_EQ(p(1), 3u);
  EXPECT_EQ(p.at(3), 2u);
  EXPECT_THROW(p.at(0), UsageError);
  EXPECT_THROW(p.at(4), UsageError);
  EXPECT_EQ(values_of(Permutation::identity(4)), (std::vector<Permutation::value_type>{1, 2, 3, 4}));
}

TEST(PermutationTest, SwapExchangesPositions) {
  const Permutation p({1, 2, 3, 4});
  EXPECT_EQ(values_of(swap(p, 1, 4)), (std::vector<Permutation::value_type>{4, 2, 3, 1}));
  EXPECT_EQ(swap(p, 2, 2), p);
  EXPECT_EQ(swap(swap(p, 1, 3), 1, 3), p);
  EXPECT_THROW(swap(p, 0, 1), UsageError);
  EXPECT_THROW(swap(p, 1, 5), UsageError);
}

TEST(SignLabels, FirstHalfIsPositive) {
  const Permutation p({4, 1, 3, 2});
  EXPECT_EQ(sign_labels(p, 4), (SignSequence{-1, 1, -1, 1}));
  EXPECT_THROW(sign_labels(Permutation::identity(3), 3), UsageError);
  EXPECT_THROW(sign_labels(p, 6), UsageError);
}

TEST(SignLabels, AlwaysBalanced) {
  RngStream s = derive_stream(3, 1, 4);
  for (int k = 0; k < 100; ++k) {
    const auto signs = sign_labels(shuffle(s, 12), 12);
    int sum = 0;
    for (int v : signs) sum += v;
    EXPECT_EQ(sum, 0);
  }
}
