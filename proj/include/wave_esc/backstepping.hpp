#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "wave_esc/wave_field.hpp"

namespace wave_esc {

/// Backstepping gains for the (ϑ, u) → (Z, w) transformation.
///
/// λ = g'(D)·K̄ = −D·K̄ must be positive, so K̄ < 0. For c₀ > 1 the kernel
/// denominator e^{λD} + r e^{−λD} vanishes at λ = ln((1+c₀)/(c₀−1))/(2D);
/// for 0 < c₀ < 1 it never does.
class BacksteppingGains {
 public:
  static BacksteppingGains make(double c0, double gain_K, double effective_gain,
                                double domain_length);
  /// K̄ = K·H.
  static BacksteppingGains from_hessian(double c0, double gain_K,
                                        double hessian, double domain_length);
  /// No invariant checks; for probing degenerate kernels in tests.
  static BacksteppingGains unchecked(double c0, double gain_K,
                                     double effective_gain,
                                     double domain_length);

  double c0() const noexcept { return c0_; }
  double gain_K() const noexcept { return gain_K_; }
  double effective_gain() const noexcept { return effective_gain_; }
  double lambda() const noexcept { return lambda_; }
  double ratio() const noexcept { return ratio_; }
  double domain_length() const noexcept { return length_; }

  /// True when the excluded λ value does not exist (0 < c₀ < 1).
  bool lambda_condition_vacuous() const noexcept { return c0_ < 1.0; }
  /// The excluded λ for c₀ > 1, NaN otherwise.
  double critical_lambda() const noexcept;
  /// e^{λD} + r e^{−λD}.
  double kernel_denominator() const noexcept;

 private:
  BacksteppingGains() = default;
  double c0_ = 0.0;
  double gain_K_ = 0.0;
  double effective_gain_ = 0.0;
  double lambda_ = 0.0;
  double ratio_ = 0.0;
  double length_ = 0.0;
};

/// g(y) = (D² − y²)/2, the solution of g'' = −1, g'(0) = 0, g(D) = 0.
inline double gain_g(double y, double domain_length) {
  return 0.5 * (domain_length * domain_length - y * y);
}
inline double gain_g_prime(double y, double /*domain_length*/) { return -y; }

/// γ(x) = K̄ (e^{λx} + r e^{−λx}) / (e^{λD} + r e^{−λD}).
/// Throws KernelSingularity when the denominator is below 1e−12.
double kernel_gamma(const BacksteppingGains& gains, double x);
double kernel_gamma_prime(const BacksteppingGains& gains, double x);
std::vector<double> kernel_gamma_nodes(const BacksteppingGains& gains,
                                       const Grid& grid);

/// Z = ϑ − g'(D) c₀ ∫u + ∫ g ∂ₜu.
double transform_Z(double vartheta, std::span<const double> u,
                   std::span<const double> u_t, const Grid& grid,
                   const BacksteppingGains& gains);

/// w(x) = u(x) − γ(x) Z + c₀ ∫₀ˣ ∂ₜu.
std::vector<double> transform_w(std::span<const double> u,
                                std::span<const double> u_t, double Z,
                                const Grid& grid,
                                const BacksteppingGains& gains);

/// u(x) = w(x) + γ(x) Z − c₀ ∫₀ˣ ∂ₜu.
std::vector<double> inverse_transform_w(std::span<const double> w,
                                        std::span<const double> u_t, double Z,
                                        const Grid& grid,
                                        const BacksteppingGains& gains);

/// dZ/dt along the error dynamics, with ∂ₜₜu = ∂ₓₓu and dϑ/dt = ∫u.
double transform_Z_rate(std::span<const double> u, std::span<const double> u_t,
                        const Grid& grid, const BacksteppingGains& gains);

/// ∂ₜw = ∂ₜu − γ Ż + c₀ ∫₀ˣ ∂ₓₓu.
std::vector<double> transform_w_rate(std::span<const double> u,
                                     std::span<const double> u_t,
                                     const Grid& grid,
                                     const BacksteppingGains& gains);

struct LyapunovConfig {
  double delta = 0.05;
};

/// V = ½Z² + ½(‖∂ₓw‖² + ‖∂ₜw‖²) + δ ∫ (y − 2) ∂_y w ∂ₜw dy.
/// Throws ConfigError if the result is negative (δ too large).
double lyapunov_V(double Z, std::span<const double> w,
                  std::span<const double> w_t, const Grid& grid,
                  const LyapunovConfig& cfg);

/// Checks V − ½Z² ≥ ¼(‖∂ₓw‖² + ‖∂ₜw‖²) on `trials` random smooth fields plus
/// aligned worst cases. Throws ConfigError advising a smaller δ otherwise.
void probe_positive_definite(const LyapunovConfig& cfg, const Grid& grid,
                             std::uint64_t seed, int trials = 100);

/// Ω = ϑ² + ‖∂ₓu‖² + ‖∂ₜu‖².
double omega_norm(double vartheta, std::span<const double> u,
                  std::span<const double> u_t, const Grid& grid);

/// Residuals of the target system, each normalized by `scale`
/// (max over the trajectory of |Z| and ‖w‖∞).
struct TargetResidualReport {
  double z_decay = 0.0;         ///< max |Ż + λZ|
  double left_boundary = 0.0;   ///< max |∂ₓw(0) − c₀ ∂ₜw(0)|
  double right_boundary = 0.0;  ///< max |w(D)|
  double interior_wave = 0.0;   ///< max |∂ₜₜw − ∂ₓₓw| over interior nodes
  /// Root-mean-square counterparts over all samples (and nodes).
  double rms_z_decay = 0.0;
  double rms_left_boundary = 0.0;
  double rms_right_boundary = 0.0;
  double rms_interior_wave = 0.0;
  double scale = 0.0;
  std::size_t samples = 0;

  double worst() const noexcept;
};

/// Streams equally spaced (t, Z, w) snapshots and accumulates target-system
/// residuals with central time differences. Only three snapshots are kept.
class TargetResidualMonitor {
 public:
  TargetResidualMonitor(const Grid& grid, const BacksteppingGains& gains);

  void push(double t, double Z, std::vector<double> w);
  TargetResidualReport report() const;

 private:
  struct Snapshot {
    double t;
    double Z;
    std::vector<double> w;
  };
  Grid grid_;
  BacksteppingGains gains_;
  std::deque<Snapshot> window_;
  TargetResidualReport raw_;
  double sq_z_ = 0.0, sq_left_ = 0.0, sq_right_ = 0.0, sq_wave_ = 0.0;
  std::size_t snapshots_ = 0, wave_terms_ = 0;
};

struct TargetSnapshot {
  double t = 0.0;
  double Z = 0.0;
  std::vector<double> w;
};

TargetResidualReport target_residuals(std::span<const TargetSnapshot> trajectory,
                                      const BacksteppingGains& gains,
                                      const Grid& grid);

}  // namespace wave_esc
