#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wave_esc/backstepping.hpp"
#include "wave_esc/probing.hpp"
#include "wave_esc/wave_field.hpp"

namespace wave_esc {

/// How the demodulated Ĝ, Ĥ enter the filtered law.
enum class EstimatorMode {
  period_mean,  ///< trailing mean over one probe period Π
  raw,          ///< instantaneous M·y and N·y
};

const char* to_string(EstimatorMode mode);
/// Accepts "period_mean" or "raw"; throws ConfigError otherwise.
EstimatorMode parse_estimator_mode(const std::string& text);

/// Trailing mean over exactly one period of a signal sampled every `dt`.
/// The window start falls between samples; the rule integrates local cubic
/// interpolants, so it is exact for cubics and fourth order in dt.
/// value() is 0 until the window (plus one sample of stencil) has filled.
class PeriodMean {
 public:
  PeriodMean(double period, double dt);

  void push(double sample);
  bool ready() const noexcept { return count_ == capacity_; }
  double value() const noexcept { return value_; }

 private:
  void build_weights();

  double period_;
  double dt_;
  std::size_t whole_;    ///< whole intervals inside the window
  double fraction_;      ///< leftover fraction of one interval
  std::size_t capacity_;
  std::vector<double> weights_;  ///< oldest first
  std::vector<double> samples_;  ///< ring buffer
  std::size_t head_ = 0;         ///< slot of the oldest sample once full
  std::size_t count_ = 0;
  double value_ = 0.0;
};

/// Weight applied to the period means: 0 until t = Π, then a C² ramp
/// reaching 1 at t = 2Π.
double estimator_warmup(double t, double period);

struct ControllerSettings {
  double gain_K = 0.1;
  double filter_c = 10.0;
  double c0 = 0.5;
  double theta_hat0 = 0.0;
  EstimatorMode estimator = EstimatorMode::period_mean;
};

struct ControllerState {
  double theta_hat = 0.0;
  double U = 0.0;
  double filter_c = 10.0;
  double gain_K = 0.1;
  double c0 = 0.5;
  double t = 0.0;
  EstimatorMode estimator = EstimatorMode::period_mean;
  double G_hat = 0.0;  ///< estimate used in the last update
  double H_hat = 0.0;
  double target = 0.0;
  PeriodMean G_mean{1.0, 0.1};
  PeriodMean H_mean{1.0, 0.1};
};

ControllerState make_controller_state(const ControllerSettings& settings,
                                      const ProbeDesign& probe, double dt);

/// Controller-side measurements at time t.
struct Measurements {
  double y = 0.0;
  double Theta = 0.0;
  std::span<const double> u;
  std::span<const double> u_t;
  double t = 0.0;
};

/// U = K̄·Z − c₀∫∂ₜu.
double ideal_control(double vartheta, std::span<const double> u,
                     std::span<const double> u_t, const Grid& grid,
                     const BacksteppingGains& gains);

/// K·Ĝ_av + K·Ĥ_av·(−g'(D)c₀∫u + ∫g∂ₜu) − c₀∫∂ₜu with Ĝ_av = H·ϑ,
/// Ĥ_av = H, where H = K̄/K.
double average_control(double vartheta, std::span<const double> u,
                       std::span<const double> u_t, const Grid& grid,
                       const BacksteppingGains& gains);

/// One step of the implementable law. ∫g∂ₜu is replaced by the measurable
/// D·θ̂ − Θ + a·sin(ωt); U follows the first-order filter exactly for a
/// held target, then θ̂ advances by Δt·U⁺. Throws ControllerBlowup listing
/// the intermediates when any of them is non-finite.
ControllerState filtered_control_step(ControllerState state,
                                      const Measurements& meas,
                                      const ProbeDesign& probe,
                                      const Grid& grid, double dt);

/// θ(t) = θ̂ + S(t).
double boundary_input(const ControllerState& state, const ProbeDesign& probe,
                      double t);

}  // namespace wave_esc
