#include <gtest/gtest.h>

#include <cmath>

#include "shufflesgd/bounds.hpp"
#include "shufflesgd/error.hpp"

using namespace shufflesgd::bounds;

TEST(UpperBound, HighPrecisionValues) {
  const auto r = upper_bound_quadratic(10, 100, 1.0, 1.0, 1.0, 1.0, 2.0);
  EXPECT_NEAR(r.bound_value, 10.161242585628954087, 1e-13);
  EXPECT_FALSE(r.applicable());

  const auto big = upper_bound_quadratic(4, 4096, 1.0, 1.0, 1.0, 1.0, 2.0);
  EXPECT_NEAR(big.bound_value, 0.028944685641755949489, 1e-16);
  EXPECT_TRUE(big.applicable());
}

TEST(UpperBound, ZeroExponentKeepsInitialDistance) {
  const auto l0 = upper_bound_quadratic(10, 100, 1.0, 1.0, 1.0, 2.0, 0.0);
  const auto l2 = upper_bound_quadratic(10, 100, 1.0, 1.0, 1.0, 2.0, 2.0);
  EXPECT_NEAR(l0.bound_value - l2.bound_value, 4.0 - 4.0 / 1e6, 1e-12);
}

TEST(UpperBound, Preconditions) {
  const auto r = upper_bound_quadratic(4, 4096, 1.0, 1.0, 1.0, 1.0, 2.0);
  ASSERT_EQ(r.preconditions.size(), 2u);
  EXPECT_NEAR(r.preconditions[1].required, 128.0 * std::log(16384.0), 1e-9);
  EXPECT_FALSE(upper_bound_quadratic(4, 4096, 1.0, 1.0, 1.0, 1.0, 2.5).applicable());
  EXPECT_FALSE(upper_bound_quadratic(4, 1000, 1.0, 1.0, 1.0, 1.0, 2.0).applicable());
  EXPECT_FALSE(upper_bound_quadratic(4, 4096, 0.5, 1.0, 1.0, 1.0, 2.0).applicable());
}

TEST(UpperBound, DecreasesWithNAtFixedK) {
  EXPECT_GT(upper_bound_quadratic(8, 1000, 1.0, 1.0, 1.0, 1.0, 2.0).bound_value,
            upper_bound_quadratic(16, 1000, 1.0, 1.0, 1.0, 1.0, 2.0).bound_value);
}

TEST(UpperBound, Monotonicity) {
  // Increasing in n at a fixed horizon T = nK (at fixed K every term shrinks
  // with n, since T grows with it).
  double prev = 0.0;
  for (std::size_t n = 2; n <= 512; n *= 2) {
    const std::size_t k = (std::size_t{1} << 20) / n;
    const double v = upper_bound_quadratic(n, k, 1.0, 1.0, 1.0, 1.0, 2.0).bound_value;
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = INFINITY;
  for (std::size_t k = 2; k <= 4096; k *= 2) {
    const double v = upper_bound_quadratic(16, k, 1.0, 1.0, 1.0, 1.0, 2.0).bound_value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(LowerBound, ExactPowerOfTwo) {
  const auto r = lower_bound_general(256, std::size_t{1} << 31, 1.0, 131072.0);
  EXPECT_EQ(r.bound_value, std::ldexp(1.0, -126));
  EXPECT_TRUE(r.applicable());
}

TEST(LowerBound, Gates) {
  EXPECT_FALSE(lower_bound_general(256, std::size_t{1} << 31, 1.0, 4.0).applicable());
  EXPECT_FALSE(lower_bound_general(255, std::size_t{1} << 31, 1.0, 131072.0).applicable());
  EXPECT_FALSE(lower_bound_general(252, std::size_t{1} << 31, 1.0, 131072.0).applicable());
  EXPECT_FALSE(lower_bound_general(256, std::size_t{1} << 30, 1.0, 131072.0).applicable());
  EXPECT_EQ(lower_bound_general(256, 100, 1.0, 4.0).preconditions.size(), 4u);
}

TEST(AlphaWindow, Values) {
  const auto w = alpha_window(256, std::size_t{1} << 20, 131072.0);
  EXPECT_EQ(w.lo, std::ldexp(1.0, -28));
  EXPECT_EQ(w.hi, std::ldexp(1.0, -39));
  EXPECT_TRUE(w.empty());
  EXPECT_FALSE(w.contains(w.lo));

  const auto v = alpha_window(4, 4, 1.0);
  EXPECT_EQ(v.lo, 1.0 / 16);
  EXPECT_EQ(v.hi, std::ldexp(1.0, -16));
  EXPECT_TRUE(v.empty());

  const auto ok = alpha_window(256, std::size_t{1} << 31, 131072.0);
  EXPECT_FALSE(ok.empty());
  EXPECT_TRUE(ok.contains(ok.lo));
  EXPECT_TRUE(ok.contains(ok.hi));
  EXPECT_LT(alpha_window(8, 200, 1.0).lo, alpha_window(8, 100, 1.0).lo);
}

TEST(ReferenceRates, Values) {
  EXPECT_DOUBLE_EQ(reference_rate(ReferenceRate::kNOverT2, 2.0, 10, 10), 2.0 * 10 / 1e4);
  EXPECT_DOUBLE_EQ(reference_rate(ReferenceRate::kN2OverT3, 1.0, 10, 10), 100.0 / 1e6);
  EXPECT_DOUBLE_EQ(reference_rate(ReferenceRate::kN3OverT3, 1.0, 10, 10), 1e3 / 1e6);
  EXPECT_DOUBLE_EQ(reference_rate(ReferenceRate::kInvT2PlusN2OverT3, 1.0, 10, 10), 1e-4 + 1e-4);
  for (auto r : {ReferenceRate::kNOverT2, ReferenceRate::kN2OverT3, ReferenceRate::kN3OverT3,
                 ReferenceRate::kInvT2PlusN2OverT3}) {
    EXPECT_EQ(parse_reference_rate(reference_rate_name(r)), r);
  }
  EXPECT_THROW(parse_reference_rate("n/T"), shufflesgd::UsageError);
}

TEST(BoundOutput, CsvHasOneRowPerPrecondition) {
  std::ostringstream s;
  write_csv_header(s);
  write_csv(s, upper_bound_quadratic(10, 100, 1.0, 1.0, 1.0, 1.0, 2.0));
  const std::string text = s.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.rfind("bound,value,precondition,required,actual,satisfied\n", 0), 0u);
  std::ostringstream t;
  write_text(t, lower_bound_general(256, 100, 1.0, 4.0));
  EXPECT_NE(t.str().find("L >= 2^17"), std::string::npos);
}
