#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wave_esc/errors.hpp"
#include "wave_esc/probing.hpp"
#include "wave_esc/verification.hpp"
#include "wave_esc/wave_field.hpp"

using namespace wave_esc;

namespace {
constexpr double kPi = std::numbers::pi;
// High-precision values: A = 0.75/sin(7.5), S amplitude = A cos(7.5).
constexpr double kA = 0.799573580565357;
constexpr double kS = 0.277160442231762;

ProbeDesign defaults() { return ProbeDesign::make(0.1, 7.5, 1.0); }
}  // namespace

TEST(Frequency, DefaultIsAdmissible) {
  const auto v = check_frequency(7.5, 1.0);
  EXPECT_TRUE(v.admissible);
  EXPECT_EQ(v.nearest_k, 2);
  EXPECT_NEAR(v.resonance, 2.0 * kPi, 1e-12);
}

TEST(Frequency, ExactResonanceRejected) {
  const auto v = check_frequency(kPi, 1.0);
  EXPECT_FALSE(v.admissible);
  EXPECT_EQ(v.nearest_k, 1);
  EXPECT_THROW(ProbeDesign::make(0.1, kPi, 1.0), ValidationError);
}

TEST(Frequency, ResonanceOnLongerDomain) {
  const auto v = check_frequency(2.0 * kPi / 3.0, 3.0);
  EXPECT_FALSE(v.admissible);
  EXPECT_EQ(v.nearest_k, 2);
}

TEST(Frequency, TruncatedPiRejected) {
  EXPECT_FALSE(check_frequency(3.14159265, 1.0).admissible);
}

TEST(Frequency, InvalidInputs) {
  EXPECT_THROW(check_frequency(0.0, 1.0), ValidationError);
  EXPECT_THROW(check_frequency(-1.0, 1.0), ValidationError);
  EXPECT_THROW(check_frequency(7.5, 0.0), ValidationError);
  EXPECT_THROW(ProbeDesign::make(0.0, 7.5, 1.0), ValidationError);
}

TEST(Beta, CoefficientAndBoundaryAmplitude) {
  const auto d = defaults();
  EXPECT_NEAR(d.coefficient(), kA, 1e-12);
  EXPECT_NEAR(d.boundary_amplitude(), kS, 1e-12);
  EXPECT_NEAR(d.period(), 2.0 * kPi / 7.5, 1e-15);
}

TEST(Beta, PointValues) {
  const auto d = defaults();
  EXPECT_NEAR(beta(d, 0.0, kPi / (2.0 * 7.5)), kA, 1e-12);
  EXPECT_EQ(beta(d, 0.37, 0.0), 0.0);
  EXPECT_NEAR(beta_t(d, 0.0, 0.0), kA * 7.5, 1e-12);
  for (double t : {0.0, 0.3, 1.7, 5.2}) EXPECT_EQ(beta_x(d, 0.0, t), 0.0);
}

TEST(Beta, OutsideDomainRejected) {
  const auto d = defaults();
  EXPECT_THROW(beta(d, -0.1, 0.0), ValidationError);
  EXPECT_THROW(beta_t(d, 1.1, 0.0), ValidationError);
  EXPECT_NO_THROW(beta(d, 1.0, 0.0));
}

TEST(Beta, CentralDifferencesMatchDerivatives) {
  const auto d = defaults();
  const double h = 1e-4;
  for (double x : {0.1, 0.5, 0.9}) {
    for (double t : {0.2, 1.1, 3.3}) {
      EXPECT_NEAR((beta(d, x, t + h) - beta(d, x, t - h)) / (2 * h), beta_t(d, x, t), 1e-6);
      EXPECT_NEAR((beta(d, x + h, t) - beta(d, x - h, t)) / (2 * h), beta_x(d, x, t), 1e-6);
    }
  }
}

TEST(Beta, WaveResidualAtRandomPoints) {
  const auto d = defaults();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> px(1e-3, 1.0 - 1e-3), pt(0.0, 10.0);
  const double h = 1e-4;
  for (int i = 0; i < 100; ++i) {
    const double x = px(rng), t = pt(rng);
    const double b = beta(d, x, t);
    const double btt = (beta(d, x, t + h) - 2 * b + beta(d, x, t - h)) / (h * h);
    const double bxx = (beta(d, x + h, t) - 2 * b + beta(d, x - h, t)) / (h * h);
    EXPECT_LE(std::abs(btt - bxx), 1e-5);
  }
}

TEST(Beta, IntegralIsProbeSignal) {
  const auto d = defaults();
  const double err = trajectory_quadrature_error(d, 1001, 2.0 * d.period());
  EXPECT_LE(err, 1e-4);
  const double coarse = trajectory_quadrature_error(d, 501, 2.0 * d.period());
  EXPECT_NEAR(coarse / err, 4.0, 0.1);
}

TEST(Beta, CosineIntegralConstant) {
  const Grid g(1.0, 2001);
  std::vector<double> c(2001);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::cos(7.5 * g.node(i));
  EXPECT_NEAR(spatial_integral(c, g), 0.125066663569965, 1e-6);
}

TEST(Beta, SeriesMatchesClosedForm) {
  const auto d = defaults();
  for (double x : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    for (double t : {0.1, 0.4, 0.77}) {
      EXPECT_NEAR(beta_series(d, x, t), beta(d, x, t), 1e-10);
    }
  }
  // too few terms must not already agree
  EXPECT_GT(std::abs(beta_series(d, 1.0, 0.2, 3) - beta(d, 1.0, 0.2)), 1e-3);
}

TEST(Perturbation, EqualsBetaAtBoundary) {
  const auto d = defaults();
  EXPECT_EQ(perturbation_S(d, 0.0), 0.0);
  for (double t : {0.1, 0.9, 2.5}) {
    EXPECT_DOUBLE_EQ(perturbation_S(d, t), beta(d, 1.0, t));
  }
}

TEST(Perturbation, VanishesWhenBoundaryIsNode) {
  const auto d = ProbeDesign::make(0.1, kPi / 2.0, 1.0);
  EXPECT_NEAR(perturbation_S(d, 0.7), 0.0, 1e-15);
  EXPECT_GT(std::abs(beta(d, 0.0, 0.7)), 0.01);
}

TEST(Demodulation, Values) {
  const double w = 7.5, a = 0.1;
  EXPECT_EQ(demod_M(a, w, 0.0), 0.0);
  EXPECT_NEAR(demod_M(a, w, kPi / (2 * w)), 20.0, 1e-12);
  EXPECT_NEAR(demod_N(a, w, 0.0), -800.0, 1e-10);
  EXPECT_NEAR(demod_N(a, w, kPi / (4 * w)), 0.0, 1e-10);
  EXPECT_NEAR(demod_N(a, w, kPi / (2 * w)), 800.0, 1e-10);
  const double P = 2 * kPi / w;
  EXPECT_NEAR(demod_M(a, w, 0.3 + P), demod_M(a, w, 0.3), 1e-12);
  EXPECT_THROW(demod_M(0.0, w, 0.0), ValidationError);
  EXPECT_THROW(demod_N(-1.0, w, 0.0), ValidationError);
}

TEST(Demodulation, Estimates) {
  EXPECT_EQ(grad_estimate(0.0, 3.0), 0.0);
  EXPECT_EQ(hess_estimate(2.0, -4.0), -8.0);
}

TEST(Demodulation, FrozenMeansRecoverGradientAndHessian) {
  const auto m = MapParams::make(-2.0, 2.0, 5.0);
  for (double v : {-0.5, 0.0, 0.3}) {
    const auto fm = frozen_estimate_means(m, 0.1, 7.5, v);
    EXPECT_NEAR(fm.G, -2.0 * v, 1e-6);
    EXPECT_NEAR(fm.H, -2.0, 1e-6);
  }
}
