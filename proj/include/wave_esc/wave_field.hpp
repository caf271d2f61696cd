#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wave_esc {

/// Uniform grid x_i = i·Δx on [0, D] with N ≥ 3 nodes.
class Grid {
 public:
  Grid(double domain_length, std::size_t node_count);

  double length() const noexcept { return length_; }
  std::size_t nodes() const noexcept { return nodes_; }
  double spacing() const noexcept { return spacing_; }
  double node(std::size_t i) const noexcept {
    return i + 1 == nodes_ ? length_ : static_cast<double>(i) * spacing_;
  }
  std::vector<double> coordinates() const;

  /// Largest stable step of the unit-speed explicit scheme.
  double cfl_limit() const noexcept { return spacing_; }
  /// Default step Δx/2.
  double default_time_step() const noexcept { return 0.5 * spacing_; }

 private:
  double length_;
  std::size_t nodes_;
  double spacing_;
};

/// Snapshot of the wave state (α, ∂ₜα) at `time`.
///
/// `boundary_prev` is the Dirichlet value one step earlier; it feeds the
/// second-order backward difference used for the boundary velocity.
struct WaveField {
  std::vector<double> displacement;
  std::vector<double> velocity;
  double time = 0.0;
  std::uint64_t step_index = 0;
  double boundary_prev = 0.0;
};

enum class End { left, right };

WaveField init_field(const Grid& grid, std::span<const double> displacement,
                     std::span<const double> velocity, double time = 0.0);

/// Advances ∂ₜₜα = ∂ₓₓα, ∂ₓα(0) = 0, α(D) = `boundary_value` by `dt`.
///
/// Kick-drift-kick leapfrog: identical displacement history to the classic
/// staggered leapfrog with a half-step start, but the returned velocity is
/// synchronized with the displacement. Node 0 uses the mirror ghost
/// α₋₁ = α₁. The last node is overwritten with the boundary value and its
/// velocity comes from a second-order backward difference of the boundary
/// history; the first step uses the trapezoid relation with the initial
/// boundary velocity instead.
WaveField step(const WaveField& field, const Grid& grid, double boundary_value,
               double dt);

/// Composite trapezoid ∫₀ᴰ f dy.
double spatial_integral(std::span<const double> values, const Grid& grid);

/// Running trapezoid F_i = ∫₀^{x_i} f dy, F_0 = 0.
std::vector<double> cumulative_integral(std::span<const double> values,
                                        const Grid& grid);

/// Θ = ∫₀ᴰ α dy.
double distributed_output(const WaveField& field, const Grid& grid);

/// Second-order one-sided ∂ₓ estimate at an endpoint.
double boundary_slope(std::span<const double> values, const Grid& grid,
                      End end);

/// ∂ₓ at every node: central in the interior, second-order one-sided at
/// both ends.
std::vector<double> first_difference(std::span<const double> values,
                                     const Grid& grid);

/// ∂ₓₓ at every node: 3-point interior stencil, Neumann ghost node at x = 0,
/// one-sided closure at x = D.
std::vector<double> second_difference(std::span<const double> values,
                                      const Grid& grid);

/// ½Σ wᵢ(∂ₜα)ᵢ² + ½Σ ((α_{i+1} − α_i)/Δx)² Δx with trapezoid weights wᵢ.
double discrete_energy(const WaveField& field, const Grid& grid);

}  // namespace wave_esc
