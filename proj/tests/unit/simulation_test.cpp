#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "wave_esc/config.hpp"
#include "wave_esc/errors.hpp"
#include "wave_esc/simulation.hpp"

using namespace wave_esc;

namespace {

const SimTrace& baseline() {
  static const SimTrace trace = run_closed_loop(SimConfig{});
  return trace;
}

template <class F>
void over_tail(const SimTrace& tr, F&& f) {
  const double start = 0.9 * tr.t.back();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.t[i] >= start) f(i);
  }
}

}  // namespace

TEST(SimConfig, Defaults) {
  const SimConfig c;
  EXPECT_DOUBLE_EQ(c.dt(), 0.005);
  EXPECT_EQ(c.steps(), 20000u);
  EXPECT_NO_THROW(c.validate());
}

TEST(SimConfig, RejectsShortHorizonAndCfl) {
  SimConfig c;
  c.horizon = 5.0;  // 10 periods at 7.5 rad/s is about 8.4
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig{};
  c.time_step = 0.011;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig{};
  c.record_stride = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ErrorFields, VanishWhenPlantTracksReference) {
  const Grid grid(1.0, 101);
  const auto probe = ProbeDesign::make(0.1, 7.5, 1.0);
  std::vector<double> a(101), v(101);
  const double t = 0.37;
  for (std::size_t i = 0; i < 101; ++i) {
    a[i] = beta(probe, grid.node(i), t);
    v[i] = beta_t(probe, grid.node(i), t);
  }
  const auto e = compute_error_fields(init_field(grid, a, v, t), probe, grid);
  for (std::size_t i = 0; i < 101; ++i) {
    EXPECT_NEAR(e.alpha_bar[i], 0.0, 1e-15);
    EXPECT_NEAR(e.u[i], 0.0, 1e-14);
    EXPECT_NEAR(e.u_t[i], 0.0, 1e-9);
  }
}

TEST(ErrorFields, GridReferenceIntegratesToProbeSignal) {
  const Grid grid(1.0, 101);
  const auto probe = ProbeDesign::make(0.1, 7.5, 1.0);
  const ProbeReference ref(probe, grid, ProbeMode::grid, 0.005);
  for (double t : {0.1, 0.7, 2.3}) {
    EXPECT_NEAR(spatial_integral(ref.values(t), grid), 0.1 * std::sin(7.5 * t), 1e-15);
  }
  EXPECT_NEAR(ref.wavenumber(), 7.5, 1e-2);
}

TEST(ClosedLoop, ConvergesToOptimum) {
  const auto& tr = baseline();
  over_tail(tr, [&](std::size_t i) {
    EXPECT_LE(std::abs(tr.y[i] - 5.0), 0.05);
    EXPECT_LE(std::abs(tr.Theta[i] - 2.0), 0.15);
    EXPECT_LE(std::abs(tr.theta[i] - 2.0), 0.35);
  });
}

TEST(ClosedLoop, RowCountAndTimes) {
  const auto& tr = baseline();
  EXPECT_EQ(tr.size(), 20000u / 10u + 1u);
  EXPECT_EQ(tr.t.front(), 0.0);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.t[i], tr.t[i - 1]);
  for (const auto* col : {&tr.y, &tr.theta, &tr.Theta, &tr.U, &tr.G_hat, &tr.H_hat,
                          &tr.vartheta, &tr.Omega, &tr.V}) {
    EXPECT_EQ(col->size(), tr.size());
  }
  SimConfig c;
  c.record_stride = 7;
  EXPECT_EQ(run_closed_loop(c).size(), 20000u / 7u + 1u);
}

TEST(ClosedLoop, Deterministic) {
  const auto again = run_closed_loop(SimConfig{});
  const auto& tr = baseline();
  ASSERT_EQ(again.size(), tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(again.y[i], tr.y[i]);
    EXPECT_EQ(again.U[i], tr.U[i]);
  }
  EXPECT_EQ(again.config_hash, tr.config_hash);
}

TEST(ClosedLoop, ConsistencyDiagnostics) {
  const auto& tr = baseline();
  const double dx = 0.01;
  EXPECT_LE(tr.max_vartheta_gap, 5 * dx * dx);
  EXPECT_LE(tr.max_boundary_error, 1e-9);
  EXPECT_LE(tr.max_boundary_gap, 200 * dx * dx);
}

TEST(ClosedLoop, BoundaryGapSecondOrder) {
  SimConfig coarse;
  coarse.nodes = 51;
  SimConfig fine;
  fine.nodes = 101;
  const double ratio =
      run_closed_loop(coarse).max_boundary_gap / run_closed_loop(fine).max_boundary_gap;
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 5.0);
}

TEST(ClosedLoop, FastEnough) {
  const auto start = std::chrono::steady_clock::now();
  (void)run_closed_loop(SimConfig{});
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(s, 5.0);
}

TEST(ClosedLoop, ZeroGainHoldsEstimate) {
  SimConfig c;
  c.control.gain_K = 0.0;
  c.control.theta_hat0 = 1.5;
  c.horizon = 10.0;
  const auto tr = run_closed_loop(c);
  const ProbeReference ref(c.probe(), c.grid(), c.probe_mode, c.dt());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_NEAR(tr.theta[i] - ref.boundary(tr.t[i]), 1.5, 1e-12);
    EXPECT_TRUE(std::isnan(tr.V[i]));
  }
}

TEST(ClosedLoop, NoDriftAtEquilibriumWithSmallProbe) {
  SimConfig c;
  c.amplitude = 0.01;
  c.control.theta_hat0 = 2.0;
  const auto tr = run_closed_loop(c);
  const ProbeReference ref(c.probe(), c.grid(), c.probe_mode, c.dt());
  double drift = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    drift = std::max(drift, std::abs(tr.theta[i] - ref.boundary(tr.t[i]) - 2.0));
  }
  EXPECT_LT(drift, 1e-8);
}

TEST(ClosedLoop, RawEstimatorDiverges) {
  SimConfig c;
  c.control.estimator = EstimatorMode::raw;
  try {
    (void)run_closed_loop(c);
    FAIL() << "expected divergence";
  } catch (const ClosedLoopBlowup& e) {
    EXPECT_GT(e.partial().size(), 0u);
    EXPECT_GT(e.step(), 0u);
  }
}

TEST(ClosedLoop, RippleIsPeriodic) {
  SimConfig c;
  c.record_stride = 1;
  const auto tr = run_closed_loop(c);
  const double P = c.probe().period();
  const double dt = c.dt();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double t = tr.t[i];
    if (t < 80.0 || t + P > tr.t.back()) continue;
    const double pos = (t + P) / dt;
    const auto k = static_cast<std::size_t>(pos);
    const double f = pos - k;
    const double later = tr.y[k] * (1 - f) + tr.y[k + 1] * f;
    EXPECT_NEAR(later, tr.y[i], 0.01 * std::abs(tr.y[i]));
  }
}

TEST(ClosedLoop, AveragedDescentAboveRippleFloor) {
  SimConfig c;
  c.record_stride = 1;
  const auto tr = run_closed_loop(c);
  const double P = c.probe().period();
  const double floor = 1e-4 * std::abs(tr.vartheta.front());
  double prev = INFINITY;
  for (double s = 2 * P; s + P <= tr.t.back(); s += P) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (tr.t[i] >= s && tr.t[i] < s + P) {
        sum += std::abs(tr.vartheta[i]);
        ++n;
      }
    }
    const double m = sum / n;
    if (m < floor) break;
    EXPECT_LE(m, prev * 1.02) << "window at t=" << s;
    prev = m;
  }
}

TEST(Bounds, AmplitudeHalvingShrinksOutputError) {
  SimConfig half;
  half.amplitude = 0.05;
  const double r = ultimate_bounds_report(baseline(), SimConfig{}).sup_y /
                   ultimate_bounds_report(run_closed_loop(half), half).sup_y;
  EXPECT_GE(r, 3.0);
  EXPECT_LE(r, 5.0);
}

TEST(Bounds, SyntheticConvergedTrace) {
  SimConfig c;
  const auto m = c.map;
  SimTrace tr;
  const double a = c.amplitude, w = c.frequency;
  for (int i = 0; i <= 10000; ++i) {
    const double t = 0.01 * i;
    const double Th = 2.0 + a * std::sin(w * t);
    tr.t.push_back(t);
    tr.theta.push_back(2.0);
    tr.Theta.push_back(Th);
    tr.y.push_back(eval_map(m, Th));
    tr.vartheta.push_back(0.0);
  }
  const auto b = ultimate_bounds_report(tr, c);
  EXPECT_NEAR(b.sup_Theta, a, 1e-6);
  EXPECT_NEAR(b.sup_y, 2.0 * a * a / 2.0, 1e-6);
  EXPECT_EQ(b.sup_theta, 0.0);
  EXPECT_NEAR(b.envelope_Theta, a + 1.0 / w, 1e-15);
  EXPECT_NEAR(b.c2, b.sup_Theta / b.envelope_Theta, 1e-15);
}

TEST(Averaging, OracleExamples) {
  const double w = 7.5, P = 2 * std::numbers::pi / w;
  const double dt = P / 1000;
  std::vector<double> c(1001, 4.0), s(1001);
  for (std::size_t i = 0; i <= 1000; ++i) s[i] = std::sin(w * dt * i);
  EXPECT_NEAR(averaging_oracle(c, dt, w), 4.0, 1e-13);
  EXPECT_NEAR(averaging_oracle(s, dt, w), 0.0, 1e-8);
  EXPECT_THROW(averaging_oracle(std::vector<double>(10, 1.0), dt, w), ValidationError);
  const auto m = MapParams::make(-2.0, 2.0, 5.0);
  std::vector<double> g(1001);
  for (std::size_t i = 0; i <= 1000; ++i) {
    const double t = dt * i;
    g[i] = grad_estimate(eval_map(m, 2.3 + 0.1 * std::sin(w * t)), demod_M(0.1, w, t));
  }
  EXPECT_NEAR(averaging_oracle(g, dt, w), -0.6, 1e-6);
}

TEST(Fit, RecoversExponential) {
  std::vector<double> t, v;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.1 * i);
    v.push_back(3.0 * std::exp(-0.7 * 0.1 * i));
  }
  v.push_back(0.0);  // skipped
  t.push_back(5.0);
  const auto f = fit_exponential(t, v);
  EXPECT_NEAR(f.rate, 0.7, 1e-12);
  EXPECT_NEAR(f.prefactor, 3.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(AverageSystem, DecayingModeFollowsTargetDynamics) {
  SimConfig c;
  c.horizon = 10.0;
  const auto gains = BacksteppingGains::from_hessian(0.5, 0.1, -2.0, 1.0);
  const auto tr = run_average_system(c, z_mode_initial(gains, c.grid()));
  EXPECT_DOUBLE_EQ(tr.vartheta.front(), 1.0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double ref = tr.Z[0] * std::exp(-0.2 * tr.t[i]);
    EXPECT_NEAR(tr.Z[i], ref, 0.02 * std::abs(ref));
  }
  const auto fit = fit_exponential(tr.t, tr.Omega);
  EXPECT_NEAR(fit.rate, 0.4, 1e-3);
  for (std::size_t i = tr.size() / 100 + 1; i < tr.size(); ++i) {
    EXPECT_LE(tr.V[i], tr.V[i - 1] * (1 + 1e-6));
  }
  const double dx = 0.01, dt = 0.005;
  EXPECT_LE(tr.residuals.worst(), 5 * (dx * dx + dt * dt));
}

TEST(AverageSystem, ZeroDataStaysZero) {
  SimConfig c;
  c.horizon = 10.0;
  AverageInitial zero;
  zero.vartheta = 0.0;
  const auto tr = run_average_system(c, zero);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_EQ(tr.vartheta[i], 0.0);
    EXPECT_EQ(tr.U[i], 0.0);
  }
}

TEST(AverageSystem, NeedsPositiveGain) {
  SimConfig c;
  c.control.gain_K = 0.0;
  EXPECT_THROW(run_average_system(c, AverageInitial{}), ConfigError);
}
