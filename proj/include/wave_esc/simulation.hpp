#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wave_esc/backstepping.hpp"
#include "wave_esc/controller.hpp"
#include "wave_esc/errors.hpp"
#include "wave_esc/probing.hpp"
#include "wave_esc/static_map.hpp"
#include "wave_esc/wave_field.hpp"

namespace wave_esc {

/// Plant state at t = 0.
enum class InitialState {
  probe,  ///< α = θ̂₀ + β(·,0), ∂ₜα = ∂ₜβ(·,0): error fields start at rest
  rest,   ///< α = 0, ∂ₜα = 0
};

/// Reference wave the boundary probe is designed for.
enum class ProbeMode {
  continuum,  ///< closed-form β with A = aω/sin(ωD)
  grid,       ///< discrete analogue exact for the leapfrog grid
};

const char* to_string(InitialState s);
const char* to_string(ProbeMode m);

struct SimConfig {
  MapParams map;
  double domain_length = 1.0;
  std::size_t nodes = 101;
  double amplitude = 0.1;
  double frequency = 7.5;
  ProbeMode probe_mode = ProbeMode::grid;
  ControllerSettings control;
  LyapunovConfig lyapunov;
  double time_step = 0.0;  ///< 0 selects Δx/2
  double horizon = 100.0;
  std::size_t record_stride = 10;
  InitialState initial_state = InitialState::probe;
  std::uint64_t seed = 20260101;

  Grid grid() const;
  ProbeDesign probe() const;
  double dt() const;
  std::uint64_t steps() const;
  /// Throws ConfigError/ValidationError on any violated invariant.
  void validate() const;
};

/// Reference wave values on the grid. For ProbeMode::grid the wavenumber
/// obeys the leapfrog dispersion relation and the amplitude makes the
/// trapezoid integral exactly a·sin(ωt).
class ProbeReference {
 public:
  ProbeReference(const ProbeDesign& design, const Grid& grid, ProbeMode mode,
                 double dt);

  ProbeMode mode() const noexcept { return mode_; }
  const ProbeDesign& design() const noexcept { return design_; }
  double wavenumber() const noexcept { return wavenumber_; }
  double coefficient() const noexcept { return coefficient_; }

  std::vector<double> values(double t) const;
  std::vector<double> rates(double t) const;
  double boundary(double t) const;

 private:
  ProbeDesign design_;
  Grid grid_;
  ProbeMode mode_;
  double wavenumber_;
  double coefficient_;
  double rate_factor_;
  std::vector<double> shape_;
};

struct ErrorFields {
  std::vector<double> alpha_bar;  ///< α − β
  std::vector<double> u;          ///< ∂ₜα − ∂ₜβ
  std::vector<double> u_t;        ///< ∂ₓₓᾱ
};

/// Error fields against the continuum reference β.
ErrorFields compute_error_fields(const WaveField& field,
                                 const ProbeDesign& probe, const Grid& grid);
ErrorFields compute_error_fields(const WaveField& field,
                                 const ProbeReference& reference,
                                 const Grid& grid);

struct SimTrace {
  std::vector<double> t, y, theta, Theta, U, G_hat, H_hat, vartheta, Omega, V;

  std::uint64_t config_hash = 0;
  std::uint64_t steps = 0;
  std::size_t stride = 1;
  double dt = 0.0;
  /// max |ϑ₁₆ − ϑ₂₄| over recorded steps, ϑ₁₆ = ∫(α − β) − Θ*,
  /// ϑ₂₄ = Θ − a sin(ωt) − Θ*
  double max_vartheta_gap = 0.0;
  /// max |∫∂ₜu − ∂ₓᾱ(D)| over recorded steps
  double max_boundary_gap = 0.0;
  /// max |ᾱ(D) − θ̂| over recorded steps
  double max_boundary_error = 0.0;

  std::size_t size() const noexcept { return t.size(); }
};

inline constexpr double kBlowupThreshold = 1e6;

/// Thrown when the closed loop diverges; carries the trace up to the failure.
class ClosedLoopBlowup : public NumericalBlowup {
 public:
  ClosedLoopBlowup(const std::string& what, std::uint64_t step, SimTrace partial)
      : NumericalBlowup(what, step), partial_(std::move(partial)) {}
  const SimTrace& partial() const noexcept { return partial_; }

 private:
  SimTrace partial_;
};

/// Closed loop: plant, probe, demodulation and filtered controller.
/// Records rows at steps 0, stride, 2·stride, ... ≤ steps.
SimTrace run_closed_loop(const SimConfig& config);

struct AverageInitial {
  double vartheta = 1.0;
  std::vector<double> u;    ///< empty means zero
  std::vector<double> u_t;  ///< empty means zero
};

/// Initial data whose average-system trajectory is exactly
/// u = φ(x)e^{−λt}, ϑ = e^{−λt} (w ≡ 0), normalized to ϑ(0) = 1.
AverageInitial z_mode_initial(const BacksteppingGains& gains, const Grid& grid);

struct AverageTrace {
  std::vector<double> t, vartheta, Z, U, Omega, V;
  TargetResidualReport residuals;
  double lambda = 0.0;
  std::size_t size() const noexcept { return t.size(); }
};

/// Average system: dϑ/dt = ∫u, ∂ₜₜu = ∂ₓₓu, ∂ₓu(0) = 0, u(D) = U_av with
/// U_av = average_control evaluated at the new time level (solved exactly,
/// the step is affine in U). ϑ uses the trapezoid rule in time. Every step
/// is recorded.
AverageTrace run_average_system(const SimConfig& config,
                                const AverageInitial& initial);

/// Trapezoid mean over exactly one period 2π/ω ending at the last sample;
/// samples are spaced by dt. Throws ValidationError for too few samples.
double averaging_oracle(std::span<const double> samples, double dt,
                        double omega);

struct BoundsReport {
  double window_start = 0.0;
  double sup_theta = 0.0;     ///< sup |θ − Θ*|
  double sup_Theta = 0.0;     ///< sup |Θ − Θ*|
  double sup_y = 0.0;         ///< sup |y − y*|
  double sup_vartheta = 0.0;  ///< sup |ϑ|
  double envelope_theta = 0.0;  ///< aω|cot(ωD)| + 1/ω
  double envelope_Theta = 0.0;  ///< a + 1/ω
  double envelope_y = 0.0;      ///< a² + 1/ω²
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

/// Sups over the final 10% of the trace compared with the envelopes.
BoundsReport ultimate_bounds_report(const SimTrace& trace,
                                    const SimConfig& config);

struct ExponentialFit {
  double rate = 0.0;  ///< ρ̂ in v ≈ C·e^{−ρ̂t}
  double prefactor = 0.0;
  double r_squared = 0.0;
};

/// Least squares on log v; non-positive values are skipped.
ExponentialFit fit_exponential(std::span<const double> t,
                               std::span<const double> v);

}  // namespace wave_esc
