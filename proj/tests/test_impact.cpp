#include <gtest/gtest.h>

#include <cmath>

#include "safedet/impact.hpp"

using namespace safedet;
using namespace safedet::impact;

TEST(Impact, DefaultParametersGiveThreeStageTable) {
  const ImpactResult r = run(ImpactParams{});
  EXPECT_NEAR(r.stage1, 10.95, 1e-12);
  EXPECT_NEAR(r.stage2, 5.475, 1e-12);
  // beta = -0.8 sqrt(5.475) / 5, dCol = 7.5 beta
  const double beta = -0.8 * std::sqrt(5.475) / 5.0;
  EXPECT_NEAR(r.beta, beta, 1e-15);
  EXPECT_NEAR(r.delta_col, 7.5 * beta, 1e-14);
  EXPECT_NEAR(r.stage3, 5.475 + 7.5 * beta, 1e-12);
  EXPECT_NEAR(r.stage3, 2.67, 0.01);
}

TEST(Impact, SensitivityCases) {
  ImpactParams p;
  p.av_reduction = 0.7;
  const ImpactResult r70 = run(p);
  EXPECT_NEAR(r70.stage2, 3.285, 1e-12);
  EXPECT_NEAR(r70.stage3, 1.11, 0.01);
  EXPECT_NEAR(100.0 * r70.further_reduction, 66.2, 0.2);

  p.av_reduction = 0.3;
  const ImpactResult r30 = run(p);
  EXPECT_NEAR(r30.stage2, 7.665, 1e-12);
  EXPECT_NEAR(r30.stage3, 4.34, 0.01);
  EXPECT_NEAR(100.0 * r30.further_reduction, 43.3, 0.1);
}

TEST(Impact, VisionZeroThreshold) {
  EXPECT_NEAR(vision_zero_threshold(-0.8, 5.0, 7.5), 1.44, 1e-12);
  EXPECT_NEAR(vision_zero_av_reduction(ImpactParams{}), 1.0 - 1.44 / 10.95, 1e-12);
  // At the threshold, the cooperative stage removes every remaining collision.
  ImpactParams p;
  p.av_reduction = vision_zero_av_reduction(p);
  EXPECT_NEAR(run(p).stage3, 0.0, 1e-9);
}

TEST(Impact, Stage3ClampsAtZero) {
  ImpactParams p;
  p.av_reduction = 0.95;
  const ImpactResult r = run(p);
  EXPECT_EQ(r.stage3, 0.0);
  EXPECT_EQ(r.further_reduction, 1.0);
}

TEST(Impact, ZeroVolumeIsZeroEverywhere) {
  ImpactParams p;
  p.daily_volume = 0.0;
  const ImpactResult r = run(p);
  EXPECT_EQ(r.stage1, 0.0);
  EXPECT_EQ(r.stage3, 0.0);
  EXPECT_EQ(r.further_reduction, 0.0);
}

TEST(Impact, SweepPreservesOrderAndParameters) {
  const auto table = sensitivity_sweep(ImpactParams{}, {0.0, 0.25, 0.5});
  ASSERT_EQ(table.size(), 3u);
  EXPECT_EQ(table[0].av_reduction, 0.0);
  EXPECT_EQ(table[2].stage2, run(ImpactParams{}).stage2);
  for (std::size_t i = 1; i < table.size(); ++i) EXPECT_LT(table[i].stage2, table[i - 1].stage2);
}

TEST(Impact, ValidationRejectsOutOfRange) {
  ImpactParams p;
  p.av_reduction = 1.5;
  EXPECT_THROW(run(p), Error);
  p = {};
  p.sigma_ecmap = 0.0;
  EXPECT_THROW(run(p), Error);
  p = {};
  p.rho = -1.2;
  EXPECT_THROW(run(p), Error);
  p = {};
  p.daily_volume = -1.0;
  try {
    run(p);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}
