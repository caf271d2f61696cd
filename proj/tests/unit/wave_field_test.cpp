#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wave_esc/errors.hpp"
#include "wave_esc/verification.hpp"
#include "wave_esc/wave_field.hpp"

using namespace wave_esc;

TEST(Grid, SpacingAndNodes) {
  const Grid g(1.0, 101);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.01);
  EXPECT_DOUBLE_EQ(g.node(100), 1.0);
  EXPECT_DOUBLE_EQ(g.default_time_step(), 0.005);
  EXPECT_EQ(g.coordinates().size(), 101u);
}

TEST(Grid, RejectsTooFewNodes) {
  EXPECT_THROW(Grid(1.0, 2), ConfigError);
  EXPECT_THROW(Grid(0.0, 11), ConfigError);
  EXPECT_THROW(Grid(-1.0, 11), ConfigError);
}

TEST(Quadrature, TrapezoidOfQuadratic) {
  const Grid g(1.0, 101);
  std::vector<double> f(101);
  for (std::size_t i = 0; i < 101; ++i) f[i] = g.node(i) * g.node(i);
  // trapezoid error for x^2 is h^2/6
  EXPECT_NEAR(spatial_integral(f, g), 1.0 / 3.0 + 1e-4 / 6.0, 1e-14);
}

TEST(Quadrature, CumulativeEndsAtTotal) {
  const Grid g(2.0, 41);
  std::vector<double> f(41);
  for (std::size_t i = 0; i < 41; ++i) f[i] = std::cos(g.node(i));
  const auto c = cumulative_integral(f, g);
  EXPECT_EQ(c.front(), 0.0);
  EXPECT_NEAR(c.back(), spatial_integral(f, g), 1e-14);
  EXPECT_NEAR(c.back(), std::sin(2.0), 1e-3);
}

TEST(Quadrature, SizeMismatchIsConfigError) {
  const Grid g(1.0, 11);
  std::vector<double> f(10, 1.0);
  EXPECT_THROW(spatial_integral(f, g), ConfigError);
}

TEST(Differences, ExactOnQuadratics) {
  const Grid g(1.0, 21);
  std::vector<double> f(21);
  for (std::size_t i = 0; i < 21; ++i) {
    const double x = g.node(i);
    f[i] = 3.0 * x * x - x + 2.0;
  }
  EXPECT_NEAR(boundary_slope(f, g, End::left), -1.0, 1e-11);
  EXPECT_NEAR(boundary_slope(f, g, End::right), 5.0, 1e-11);
  const auto d1 = first_difference(f, g);
  const auto d2 = second_difference(f, g);
  for (std::size_t i = 1; i + 1 < 21; ++i) {
    EXPECT_NEAR(d1[i], 6.0 * g.node(i) - 1.0, 1e-11);
    EXPECT_NEAR(d2[i], 6.0, 1e-8);
  }
  EXPECT_NEAR(d2.back(), 6.0, 1e-8);
}

TEST(WaveStep, RejectsCflViolation) {
  const Grid g(1.0, 11);
  std::vector<double> z(11, 0.0);
  const auto f = init_field(g, z, z);
  EXPECT_THROW(step(f, g, 0.0, 0.11), ConfigError);
  EXPECT_NO_THROW(step(f, g, 0.0, 0.1));
}

TEST(WaveStep, RejectsNonFiniteInput) {
  const Grid g(1.0, 11);
  std::vector<double> z(11, 0.0), bad(11, 0.0);
  bad[3] = NAN;
  EXPECT_THROW(init_field(g, bad, z), ValidationError);
  const auto f = init_field(g, z, z);
  EXPECT_THROW(step(f, g, NAN, 0.05), NumericalBlowup);
}

TEST(WaveStep, RestStaysAtRest) {
  const Grid g(1.0, 51);
  std::vector<double> z(51, 0.0);
  auto f = init_field(g, z, z);
  for (int n = 0; n < 100; ++n) f = step(f, g, 0.0, 0.01);
  for (double v : f.displacement) EXPECT_EQ(v, 0.0);
  EXPECT_NEAR(f.time, 1.0, 1e-12);
  EXPECT_EQ(f.step_index, 100u);
}

TEST(WaveStep, BoundaryValueIsImposed) {
  const Grid g(1.0, 51);
  std::vector<double> z(51, 0.0);
  auto f = init_field(g, z, z);
  f = step(f, g, 0.3, 0.01);
  EXPECT_EQ(f.displacement.back(), 0.3);
  EXPECT_NEAR(f.velocity.back(), 60.0, 1e-9);  // 2(0.3 - 0)/0.01 - 0
  f = step(f, g, 0.5, 0.01);
  EXPECT_NEAR(f.velocity.back(), (1.5 - 1.2 + 0.0) / 0.02, 1e-9);
}

TEST(WaveStep, StandingModeMatchesAnalyticSolution) {
  // cos(πx/2) cos(πt/2) satisfies the Neumann/Dirichlet pair with α(1) = 0.
  const std::size_t n = 201;
  const Grid g(1.0, n);
  const double k = std::numbers::pi / 2.0;
  std::vector<double> a(n), v(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::cos(k * g.node(i));
  auto f = init_field(g, a, v);
  const double dt = g.default_time_step();
  for (int s = 0; s < 800; ++s) f = step(f, g, 0.0, dt);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    err = std::max(err, std::abs(f.displacement[i] -
                                 std::cos(k * g.node(i)) * std::cos(k * f.time)));
  }
  EXPECT_LT(err, 1e-4);
}

TEST(WaveStep, DrivenSolutionSecondOrder) {
  const double e1 = driven_wave_error(7.5, 1.0, 101, 10.0);
  const double e2 = driven_wave_error(7.5, 1.0, 201, 10.0);
  const double e3 = driven_wave_error(7.5, 1.0, 401, 10.0);
  EXPECT_LT(e2, 1e-3);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
  EXPECT_GT(e2 / e3, 3.5);
  EXPECT_LT(e2 / e3, 4.5);
}

TEST(WaveStep, EnergyDriftSmall) {
  EXPECT_LT(undriven_energy_drift(1.0, 201, 10.0), 1e-3);
}

TEST(WaveStep, OutputIsTrapezoidOfDisplacement) {
  const Grid g(1.0, 11);
  std::vector<double> a(11, 2.0), v(11, 0.0);
  const auto f = init_field(g, a, v);
  EXPECT_NEAR(distributed_output(f, g), 2.0, 1e-14);
}
