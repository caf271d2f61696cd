#pragma once

namespace wave_esc {

/// Outcome of the resonance test ω ≠ kπ/D.
struct FrequencyVerdict {
  bool admissible = false;
  long nearest_k = 0;           ///< nearest positive resonance index
  double resonance = 0.0;       ///< kπ/D for that k
  double distance = 0.0;        ///< |ω − kπ/D|
  double cot_abs = 0.0;         ///< |cot(ωD)|, size of the S-amplitude ratio
};

/// Relative guard band around each resonance, in units of π/D.
inline constexpr double kResonanceTolerance = 1e-8;

/// Throws ValidationError when ω ≤ 0 or D ≤ 0.
FrequencyVerdict check_frequency(double omega, double domain_length);

/// Probe amplitude/frequency together with the trajectory-generation
/// coefficient A = aω / sin(ωD). Only admissible designs can be built.
class ProbeDesign {
 public:
  static ProbeDesign make(double amplitude, double omega, double domain_length);

  double amplitude() const noexcept { return amplitude_; }
  double omega() const noexcept { return omega_; }
  double domain_length() const noexcept { return length_; }
  double coefficient() const noexcept { return coefficient_; }
  double period() const noexcept { return period_; }
  /// Amplitude of S(t) = A·cos(ωD).
  double boundary_amplitude() const noexcept;

 private:
  ProbeDesign() = default;
  double amplitude_ = 0.0;
  double omega_ = 0.0;
  double length_ = 0.0;
  double coefficient_ = 0.0;
  double period_ = 0.0;
};

/// β(x,t) = A cos(ωx) sin(ωt): the reference wave whose spatial integral is
/// a·sin(ωt). Throws ValidationError for x outside [0, D].
double beta(const ProbeDesign& design, double x, double t);
double beta_t(const ProbeDesign& design, double x, double t);
double beta_x(const ProbeDesign& design, double x, double t);

/// Boundary perturbation S(t) = β(D, t).
double perturbation_S(const ProbeDesign& design, double t);

/// M(t) = (2/a) sin(ωt).
double demod_M(double amplitude, double omega, double t);
/// N(t) = −(8/a²) cos(2ωt).
double demod_N(double amplitude, double omega, double t);

inline double grad_estimate(double y, double m) { return m * y; }
inline double hess_estimate(double y, double n) { return n * y; }

}  // namespace wave_esc
