#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wave_esc/simulation.hpp"

namespace wave_esc {

/// One line of the verification table.
struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
  std::string note;
};

/// Group names accepted by run_verification, in execution order.
const std::vector<std::string>& verification_groups();

/// g and γ boundary value problems, guards and positivity of V.
std::vector<Check> verify_kernels(const SimConfig& config);
/// Closed-form reference wave: quadrature, PDE residual, series oracle.
std::vector<Check> verify_trajectory(const SimConfig& config);
/// Leapfrog solver against cos(ωx)sin(ωt) and undriven energy drift.
std::vector<Check> verify_wave(const SimConfig& config);
/// Period means of the demodulated estimates with the loop frozen.
std::vector<Check> verify_averaging(const SimConfig& config);
/// Average closed loop from the decaying target mode.
std::vector<Check> verify_average_system(const SimConfig& config);

/// Runs the named groups (all of them when `groups` is empty).
/// Throws ConfigError for an unknown group.
std::vector<Check> run_verification(const SimConfig& config,
                                    std::span<const std::string> groups);

/// Fixed-width pass/fail table.
std::string format_checks(std::span<const Check> checks);

/// Partial sum Σ_{k<terms} A(−ω²)ᵏ x²ᵏ/(2k)! · sin(ωt) of the Taylor
/// construction of β.
double beta_series(const ProbeDesign& design, double x, double t,
                   int terms = 20);

/// L∞ error at time `horizon` of the leapfrog solution driven by the
/// boundary value cos(ωD)sin(ωt) against cos(ωx)sin(ωt), Δt = Δx/2.
double driven_wave_error(double omega, double domain_length,
                         std::size_t nodes, double horizon);

/// Max relative change of the discrete energy over `horizon` for smooth
/// data with α(D) held at 0, Δt = Δx/2.
double undriven_energy_drift(double domain_length, std::size_t nodes,
                             double horizon);

/// sup over one period grid of |trapz β(·,t) − a sin(ωt)| on `nodes` nodes.
double trajectory_quadrature_error(const ProbeDesign& design,
                                   std::size_t nodes, double t_end,
                                   std::size_t samples = 2000);

/// Period means of Ĝ = M·y and Ĥ = N·y for Θ = Θ* + ϑ + a sin(ωt).
struct FrozenMeans {
  double G = 0.0;
  double H = 0.0;
};
FrozenMeans frozen_estimate_means(const MapParams& map, double amplitude,
                                  double omega, double vartheta,
                                  std::size_t samples_per_period = 1000);

/// Configuration of the average-system run used by the checks: z-mode
/// data over λt ≤ 2 (at least ten probe periods).
SimConfig average_system_config(const SimConfig& config);

}  // namespace wave_esc
