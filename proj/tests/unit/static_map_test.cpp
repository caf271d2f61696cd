#include <gtest/gtest.h>

#include <cmath>

#include "wave_esc/errors.hpp"
#include "wave_esc/static_map.hpp"

using namespace wave_esc;

TEST(StaticMap, PeakValueAtOptimizer) {
  const auto m = MapParams::make(-2.0, 2.0, 5.0);
  EXPECT_DOUBLE_EQ(eval_map(m, 2.0), 5.0);
  EXPECT_FALSE(m.minimization);
}

TEST(StaticMap, QuadraticAwayFromOptimizer) {
  const auto m = MapParams::make(-2.0, 2.0, 5.0);
  // 5 + (-2/2)(3-2)^2
  EXPECT_DOUBLE_EQ(eval_map(m, 3.0), 4.0);
  EXPECT_DOUBLE_EQ(eval_map(m, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(eval_map(m, 0.0), 1.0);
}

TEST(StaticMap, MinimizationIsStoredNegated) {
  const auto m = MapParams::make(4.0, -1.0, 3.0);
  EXPECT_TRUE(m.minimization);
  EXPECT_LT(m.hessian, 0.0);
  EXPECT_DOUBLE_EQ(m.hessian, -4.0);
  // user map: 3 + 2(Θ+1)^2, at Θ = 0 that is 5
  EXPECT_DOUBLE_EQ(original_value(m, eval_map(m, 0.0)), 5.0);
  EXPECT_DOUBLE_EQ(original_value(m, eval_map(m, -1.0)), 3.0);
}

TEST(StaticMap, RejectsDegenerateParameters) {
  EXPECT_THROW(MapParams::make(0.0, 2.0, 5.0), ValidationError);
  EXPECT_THROW(MapParams::make(-2.0, NAN, 5.0), ValidationError);
  EXPECT_THROW(MapParams::make(-2.0, 2.0, INFINITY), ValidationError);
}

TEST(StaticMap, EvaluatorHidesParameters) {
  const MapEvaluator f(MapParams::make(-2.0, 2.0, 5.0));
  EXPECT_DOUBLE_EQ(f(2.5), 4.75);
}
