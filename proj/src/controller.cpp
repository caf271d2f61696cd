#include "wave_esc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "wave_esc/errors.hpp"

namespace wave_esc {

const char* to_string(EstimatorMode mode) {
  return mode == EstimatorMode::raw ? "raw" : "period_mean";
}

EstimatorMode parse_estimator_mode(const std::string& text) {
  if (text == "period_mean") return EstimatorMode::period_mean;
  if (text == "raw") return EstimatorMode::raw;
  throw ConfigError("estimator must be period_mean or raw, got '" + text + "'");
}

PeriodMean::PeriodMean(double period, double dt) : period_(period), dt_(dt) {
  if (!(period > 0.0) || !(dt > 0.0) || !std::isfinite(period / dt)) {
    throw ConfigError("PeriodMean: period and dt must be positive");
  }
  const double ratio = period / dt;
  if (ratio < 2.0) {
    throw ConfigError("PeriodMean: period must span at least two samples");
  }
  whole_ = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  fraction_ = ratio - static_cast<double>(whole_);
  if (fraction_ < 1e-9) fraction_ = 0.0;
  capacity_ = whole_ + (fraction_ > 0.0 ? 3 : 2);
  samples_.assign(capacity_, 0.0);
  build_weights();
}

// Each interval is integrated with the cubic through four neighbouring
// samples (shifted inward at the ends), exactly via two-point Gauss.
void PeriodMean::build_weights() {
  const std::size_t n = capacity_;
  weights_.assign(n, 0.0);
  const double newest = static_cast<double>(n - 1);
  const double start = newest - (static_cast<double>(whole_) + fraction_);
  const double g = 0.5 / std::sqrt(3.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double lo = std::max(static_cast<double>(i), start);
    const double hi = static_cast<double>(i + 1);
    if (hi <= lo) continue;
    const std::size_t s = std::min(i == 0 ? 0 : i - 1, n - 4);
    const double mid = 0.5 * (lo + hi);
    const double half = hi - lo;
    for (const double x : {mid - g * half, mid + g * half}) {
      for (std::size_t k = 0; k < 4; ++k) {
        double basis = 1.0;
        for (std::size_t m = 0; m < 4; ++m) {
          if (m == k) continue;
          basis *= (x - static_cast<double>(s + m)) /
                   (static_cast<double>(s + k) - static_cast<double>(s + m));
        }
        weights_[s + k] += 0.5 * half * basis;
      }
    }
  }
  for (double& w : weights_) w *= dt_ / period_;
}

void PeriodMean::push(double sample) {
  samples_[head_] = sample;
  head_ = (head_ + 1) % capacity_;
  if (count_ < capacity_) ++count_;
  if (!ready()) return;
  double sum = 0.0;
  for (std::size_t k = 0; k < capacity_; ++k) {
    sum += weights_[k] * samples_[(head_ + k) % capacity_];
  }
  value_ = sum;
}

double estimator_warmup(double t, double period) {
  const double x = std::clamp((t - period) / period, 0.0, 1.0);
  return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

ControllerState make_controller_state(const ControllerSettings& settings,
                                      const ProbeDesign& probe, double dt) {
  if (!(settings.filter_c > 0.0)) {
    throw ConfigError("control.filter_c must be positive");
  }
  if (!std::isfinite(settings.theta_hat0)) {
    throw ConfigError("control.theta_hat0 must be finite");
  }
  ControllerState s;
  s.theta_hat = settings.theta_hat0;
  s.U = 0.0;
  s.filter_c = settings.filter_c;
  s.gain_K = settings.gain_K;
  s.c0 = settings.c0;
  s.estimator = settings.estimator;
  s.G_mean = PeriodMean(probe.period(), dt);
  s.H_mean = PeriodMean(probe.period(), dt);
  return s;
}

double ideal_control(double vartheta, std::span<const double> u,
                     std::span<const double> u_t, const Grid& grid,
                     const BacksteppingGains& gains) {
  const double Z = transform_Z(vartheta, u, u_t, grid, gains);
  return gains.effective_gain() * Z - gains.c0() * spatial_integral(u_t, grid);
}

double average_control(double vartheta, std::span<const double> u,
                       std::span<const double> u_t, const Grid& grid,
                       const BacksteppingGains& gains) {
  const double K = gains.gain_K();
  const double H = gains.effective_gain() / K;
  const double D = grid.length();
  std::vector<double> weighted(grid.nodes());
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    weighted[i] = gain_g(grid.node(i), D) * u_t[i];
  }
  const double bracket =
      -gain_g_prime(D, D) * gains.c0() * spatial_integral(u, grid) +
      spatial_integral(weighted, grid);
  return K * (H * vartheta) + K * H * bracket -
         gains.c0() * spatial_integral(u_t, grid);
}

ControllerState filtered_control_step(ControllerState state,
                                      const Measurements& meas,
                                      const ProbeDesign& probe,
                                      const Grid& grid, double dt) {
  const double a = probe.amplitude();
  const double w = probe.omega();
  const double D = grid.length();

  const double G_raw = grad_estimate(meas.y, demod_M(a, w, meas.t));
  const double H_raw = hess_estimate(meas.y, demod_N(a, w, meas.t));
  double G = G_raw;
  double H = H_raw;
  if (state.estimator == EstimatorMode::period_mean) {
    state.G_mean.push(G_raw);
    state.H_mean.push(H_raw);
    G = state.G_mean.value();
    H = state.H_mean.value();
    const double ramp = estimator_warmup(meas.t, probe.period());
    G *= ramp;
    H *= ramp;
  }

  const double int_u = spatial_integral(meas.u, grid);
  const double int_u_t = spatial_integral(meas.u_t, grid);
  const double g_weighted = D * state.theta_hat - meas.Theta + a * std::sin(w * meas.t);
  const double bracket = -gain_g_prime(D, D) * state.c0 * int_u + g_weighted;
  const double target = state.gain_K * G + state.gain_K * H * bracket - state.c0 * int_u_t;
  const double decay = std::exp(-state.filter_c * dt);
  const double U_next = target + (state.U - target) * decay;
  const double theta_next = state.theta_hat + dt * U_next;

  if (!std::isfinite(G) || !std::isfinite(H) || !std::isfinite(bracket) ||
      !std::isfinite(int_u_t) || !std::isfinite(target) ||
      !std::isfinite(U_next) || !std::isfinite(theta_next)) {
    std::ostringstream msg;
    msg << "controller produced a non-finite value at t=" << meas.t
        << ": y=" << meas.y << " G_hat=" << G << " H_hat=" << H
        << " bracket=" << bracket << " int_u_t=" << int_u_t
        << " target=" << target << " U=" << U_next
        << " theta_hat=" << theta_next;
    throw ControllerBlowup(msg.str());
  }

  state.G_hat = G;
  state.H_hat = H;
  state.target = target;
  state.U = U_next;
  state.theta_hat = theta_next;
  state.t = meas.t + dt;
  return state;
}

double boundary_input(const ControllerState& state, const ProbeDesign& probe,
                      double t) {
  return state.theta_hat + perturbation_S(probe, t);
}

}  // namespace wave_esc
