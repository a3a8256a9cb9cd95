#include <gtest/gtest.h>

#include <cmath>

#include "shufflesgd/engine.hpp"
#include "shufflesgd/error.hpp"

using namespace shufflesgd;

namespace {

RunConfig config(std::size_t n, std::size_t k, StepSizeRegime regime, RecordMode record = RecordMode::kFinalOnly) {
  RunConfig c;
  c.n = n;
  c.k_epochs = k;
  c.regime = regime;
  c.record = record;
  return c;
}

}  // namespace

TEST(Regime, AlphaValues) {
  EXPECT_NEAR(alpha_of(StepSizeRegime::c_log_t_over_t(4.0), 250, 100, 1.0),
              0.0016202609766160540482, 1e-18);
  EXPECT_DOUBLE_EQ(alpha_of(StepSizeRegime::recip_t(), 10, 5, 1.0), 1.0 / 50);
  EXPECT_DOUBLE_EQ(alpha_of(StepSizeRegime::recip_n(), 10, 5, 1.0), 0.1);
  EXPECT_DOUBLE_EQ(alpha_of(StepSizeRegime::theorem1(2.0), 4, 4096, 1.0),
                   8.0 * std::log(16384.0) / 16384.0);
  EXPECT_DOUBLE_EQ(alpha_of(StepSizeRegime::theorem1(1.0), 4, 4096, 2.0),
                   2.0 * std::log(16384.0) / 16384.0);
  EXPECT_EQ(alpha_of(StepSizeRegime::fixed(0.25), 0, 0, 0.0), 0.25);
}

TEST(Regime, RejectsInvalidParameters) {
  EXPECT_THROW(alpha_of(StepSizeRegime::recip_t(), 0, 5, 1.0), UsageError);
  EXPECT_THROW(alpha_of(StepSizeRegime::recip_t(), 5, 0, 1.0), UsageError);
  EXPECT_THROW(alpha_of(StepSizeRegime::theorem1(2.5), 5, 5, 1.0), UsageError);
  EXPECT_THROW(alpha_of(StepSizeRegime::theorem1(0.0), 5, 5, 1.0), UsageError);
  EXPECT_THROW(alpha_of(StepSizeRegime::theorem1(2.0), 5, 5, 0.0), UsageError);
  EXPECT_THROW(alpha_of(StepSizeRegime::c_log_t_over_t(-1.0), 5, 5, 1.0), UsageError);
  EXPECT_THROW(alpha_of(StepSizeRegime::fixed(-0.1), 5, 5, 1.0), UsageError);
  EXPECT_THROW(alpha_of(StepSizeRegime::fixed(NAN), 5, 5, 1.0), UsageError);
}

TEST(Regime, ParseAndLabelRoundTrip) {
  EXPECT_EQ(StepSizeRegime::parse("1/T"), StepSizeRegime::recip_t());
  EXPECT_EQ(StepSizeRegime::parse("1/n"), StepSizeRegime::recip_n());
  EXPECT_EQ(StepSizeRegime::parse("4logT/T"), StepSizeRegime::c_log_t_over_t(4.0));
  EXPECT_EQ(StepSizeRegime::parse("clog:2.5"), StepSizeRegime::c_log_t_over_t(2.5));
  EXPECT_EQ(StepSizeRegime::parse("theorem1"), StepSizeRegime::theorem1(2.0));
  EXPECT_EQ(StepSizeRegime::parse("theorem1:1.5"), StepSizeRegime::theorem1(1.5));
  EXPECT_EQ(StepSizeRegime::parse("fixed:0.01"), StepSizeRegime::fixed(0.01));
  for (const auto& r : {StepSizeRegime::recip_t(), StepSizeRegime::recip_n(),
                        StepSizeRegime::c_log_t_over_t(8.0), StepSizeRegime::theorem1(2.0),
                        StepSizeRegime::fixed(0.125)}) {
    EXPECT_EQ(StepSizeRegime::parse(r.label()), r) << r.label();
  }
  EXPECT_THROW(StepSizeRegime::parse("bogus"), UsageError);
  EXPECT_THROW(StepSizeRegime::parse("fixed:abc"), UsageError);
}

TEST(Engine, HandTraceOnSymmetricFamily) {
  const Family f = build_family(PiecewiseRecipe{1.0, 1.0}, 2);
  RunConfig c = config(2, 1, StepSizeRegime::fixed(0.1), RecordMode::kPerStep);
  const std::vector<Permutation> forward{Permutation({1, 2})};
  const auto a = run_sgdo_with_orders(f, c, forward);
  ASSERT_EQ(a.samples.size(), 3u);
  EXPECT_DOUBLE_EQ(a.samples[1].x[0], -0.05);
  EXPECT_EQ(a.samples[2].x[0], 0.0050000000000000044);
  EXPECT_EQ(a.final_iterate[0], 0.0050000000000000044);

  const std::vector<Permutation> backward{Permutation({2, 1})};
  const auto b = run_sgdo_with_orders(f, c, backward);
  EXPECT_DOUBLE_EQ(b.samples[1].x[0], 0.05);
  EXPECT_EQ(b.final_iterate[0], -0.0050000000000000044);
  EXPECT_DOUBLE_EQ(b.final_sq_error, a.final_sq_error);
}

TEST(Engine, StepMatchesSingleStepHelper) {
  const Family f = build_family(PiecewiseRecipe{4.0, 1.0}, 4);
  EXPECT_DOUBLE_EQ(sgdo_step(f, 1, {-1.0}, 0.1)[0], -1.0 - 0.1 * (-3.5));
  EXPECT_DOUBLE_EQ(sgdo_step(f, 4, {2.0}, 0.5)[0], 2.0 - 0.5 * 1.5);
}

TEST(Engine, ZeroEpochsReturnsInit) {
  const Family f = build_family(PiecewiseRecipe{4.0, 1.0}, 8);
  RunConfig c = config(8, 0, StepSizeRegime::c_log_t_over_t(4.0));
  c.init = {3.0};
  const auto t = run_sgdo(f, c);
  EXPECT_EQ(t.final_sq_error, 9.0);
  EXPECT_EQ(t.alpha, 0.0);
  EXPECT_EQ(t.permutations_drawn, 0u);
}

TEST(Engine, DeterministicGivenLineage) {
  const Family f = build_family(PiecewiseRecipe{4.0, 1.0}, 32);
  RunConfig c = config(32, 16, StepSizeRegime::c_log_t_over_t(4.0));
  c.lineage = {7, 1, 2};
  const auto a = run_sgdo(f, c);
  const auto b = run_sgdo(f, c);
  EXPECT_EQ(a.final_iterate, b.final_iterate);
  c.lineage.repeat_index = 3;
  EXPECT_NE(run_sgdo(f, c).final_iterate, a.final_iterate);
}

TEST(Engine, OneFreshPermutationPerEpoch) {
  const Family f = build_family(PiecewiseRecipe{4.0, 1.0}, 16);
  RunConfig c = config(16, 5, StepSizeRegime::recip_t());
  c.lineage = {1, 0, 0};
  const auto t = run_sgdo(f, c);
  EXPECT_EQ(t.permutations_drawn, 5u);

  // Same orders replayed explicitly give the same trajectory.
  RngStream s = derive_stream(c.lineage);
  std::vector<Permutation> orders;
  for (int j = 0; j < 5; ++j) orders.push_back(shuffle(s, 16));
  EXPECT_EQ(run_sgdo_with_orders(f, c, orders).final_iterate, t.final_iterate);
}

TEST(Engine, RecordingModes) {
  const Family f = build_family(PiecewiseRecipe{4.0, 1.0}, 4);
  const auto per_epoch = run_sgdo(f, config(4, 3, StepSizeRegime::recip_t(), RecordMode::kPerEpoch));
  ASSERT_EQ(per_epoch.samples.size(), 4u);
  EXPECT_EQ(per_epoch.samples[0].epoch, 1u);
  EXPECT_EQ(per_epoch.samples[0].step, 0u);
  EXPECT_EQ(per_epoch.samples[3].epoch, 3u);
  EXPECT_EQ(per_epoch.samples[3].step, 4u);
  EXPECT_EQ(per_epoch.samples[3].x, per_epoch.final_iterate);

  const auto per_step = run_sgdo(f, config(4, 3, StepSizeRegime::recip_t(), RecordMode::kPerStep));
  EXPECT_EQ(per_step.samples.size(), 3u * 5u);
  EXPECT_TRUE(run_sgdo(f, config(4, 3, StepSizeRegime::recip_t())).samples.empty());
}

TEST(Engine, DivergenceIsReported) {
  const Family f = build_family(PiecewiseRecipe{4.0, 1.0}, 256);
  RunConfig c = config(256, 10, StepSizeRegime::fixed(10.0));
  c.init = {1.0};
  try {
    run_sgdo(f, c);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.epoch(), 1u);
    EXPECT_GE(e.step(), 1u);
  }
}

TEST(Engine, RejectsMismatchedInputs) {
  const Family f = build_family(PiecewiseRecipe{4.0, 1.0}, 4);
  EXPECT_THROW(run_sgdo(f, config(6, 1, StepSizeRegime::recip_t())), UsageError);
  RunConfig c = config(4, 1, StepSizeRegime::recip_t());
  c.init = {0.0, 0.0};
  EXPECT_THROW(run_sgdo(f, c), UsageError);
  const std::vector<Permutation> wrong{Permutation::identity(3)};
  EXPECT_THROW(run_sgdo_with_orders(f, config(4, 1, StepSizeRegime::recip_t()), wrong), UsageError);
}

TEST(Engine, WithReplacementDrawsTIndices) {
  const Family f = build_family(PiecewiseRecipe{4.0, 1.0}, 8);
  RunConfig c = config(8, 4, StepSizeRegime::recip_t());
  const auto t = run_sgd_with_replacement(f, c);
  EXPECT_EQ(t.indices_drawn, 32u);
  EXPECT_EQ(t.permutations_drawn, 0u);
  EXPECT_EQ(run_sgd_with_replacement(f, c).final_iterate, t.final_iterate);
}

TEST(Engine, QuadraticConvergesToMinimizer) {
  QuadraticRecipe q;
  q.hessian = {2.0, 0.0, 0.0, 1.0};
  q.base_linear = {-2.0, 1.0};
  const Family f = build_family(q, 8);
  RunConfig c = config(8, 2000, StepSizeRegime::c_log_t_over_t(2.0));
  c.init = {5.0, 5.0};
  const auto t = run_sgdo(f, c);
  EXPECT_LT(t.final_sq_error, 1e-4);
  EXPECT_NEAR(f.minimizer()[0], 1.0, 1e-14);
}

TEST(Engine, ProductFamilyMatchesFactorRuns) {
  // Each axis of the product evolves independently under the same order.
  const Family prod = build_family(Product2DRecipe{4.0, 1.0}, 8);
  const Family first = build_family(PiecewiseRecipe{4.0, 1.0}, 8);
  const Family second = build_family(PiecewiseRecipe{1.0, 1.0}, 8);
  RunConfig c = config(8, 6, StepSizeRegime::fixed(0.05));
  c.lineage = {3, 0, 0};
  c.init = {0.3, -0.2};
  const auto t = run_sgdo(prod, c);
  RunConfig c1 = c;
  c1.init = {0.3};
  RunConfig c2 = c;
  c2.init = {-0.2};
  EXPECT_EQ(t.final_iterate[0], run_sgdo(first, c1).final_iterate[0]);
  EXPECT_EQ(t.final_iterate[1], run_sgdo(second, c2).final_iterate[0]);
}
